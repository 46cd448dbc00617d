"""Serialized generator inputs with per-token segment labels.

Rewrite-step layout:
    <bos> S_i <nodeC> N_i <edge> E_i <nodeP> N_P(i) <type> R_i <subq> Q_{i-1} <eos>
The child and parent blocks exchange positions when the parent points to the
child; the initial step omits the <type> and <subq> blocks. Tokens are joined
by single spaces, so text.split(" ") aligns with the segment label list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import AssemblyError
from .planner import EdgeDirection, RewriteType
from .textutil import collapse, strip_punct

BOS = "<bos>"
NODE_C = "<nodeC>"
EDGE = "<edge>"
NODE_P = "<nodeP>"
TYPE = "<type>"
SUBQ = "<subq>"
EOS = "<eos>"

MARKERS = (BOS, NODE_C, EDGE, NODE_P, TYPE, SUBQ, EOS)


class SegmentLabel(str, Enum):
    CONTEXT = "context_sentence"
    NODE_C = "node_c"
    EDGE = "edge_text"
    NODE_P = "node_p"
    TYPE = "type_tag"
    SUBQ = "sub_question"
    MARKER = "marker"


@dataclass
class GeneratorInput:
    step: int
    sentence: str
    node_child: str
    edge: str
    node_parent: str
    direction: EdgeDirection
    rewrite_type: RewriteType | None = None
    sub_question: str | None = None
    parent_aliases: tuple[str, ...] = ()

    text: str = field(init=False)
    segments: list[SegmentLabel] = field(init=False)

    def __post_init__(self):
        self.sentence = _clean_field("context sentence", self.sentence)
        self.node_child = _clean_field("child node", self.node_child)
        self.edge = _clean_field("edge text", self.edge)
        self.node_parent = _clean_field("parent node", self.node_parent)
        if self.sub_question is not None:
            self.sub_question = _clean_field("sub-question", self.sub_question)
        if (self.rewrite_type is None) != (self.sub_question is None):
            raise AssemblyError("rewrite inputs need both a rewrite type and a previous question")
        self.parent_aliases = tuple(collapse(a) for a in self.parent_aliases if collapse(a))
        self.text, self.segments = _serialize(self)

    def __eq__(self, other):
        if not isinstance(other, GeneratorInput):
            return NotImplemented
        return self.text == other.text and self.step == other.step

    def to_json(self) -> dict:
        return {"text": self.text, "segments": [s.value for s in self.segments], "step": self.step}


def _clean_field(what: str, value: str) -> str:
    value = collapse(value)
    if not value:
        raise AssemblyError(f"{what} is empty")
    for marker in MARKERS:
        if marker in value:
            raise AssemblyError(f"{what} contains reserved marker {marker}")
    return value


def _parent_alias_token_seqs(gi: GeneratorInput) -> list[list[str]]:
    seqs = []
    for alias in (gi.node_parent, *gi.parent_aliases):
        toks = [strip_punct(t).casefold() for t in alias.split()]
        if toks and all(toks):
            seqs.append(toks)
    # Longest first so the most specific alias wins at each position.
    seqs.sort(key=len, reverse=True)
    return seqs


def _relabel_parent_tokens(tokens: list[str], labels: list[SegmentLabel], lo: int, hi: int, alias_seqs) -> None:
    # Whole-token matching: a token run equal to the parent surface (or one of
    # its coreferent mentions) is relabeled NodeP.
    norm = [strip_punct(t).casefold() for t in tokens]
    i = lo
    while i < hi:
        matched = 0
        for seq in alias_seqs:
            k = len(seq)
            if i + k <= hi and norm[i : i + k] == seq:
                matched = k
                break
        if matched:
            for j in range(i, i + matched):
                labels[j] = SegmentLabel.NODE_P
            i += matched
        else:
            i += 1


def _serialize(gi: GeneratorInput) -> tuple[str, list[SegmentLabel]]:
    child_block = [(NODE_C, SegmentLabel.MARKER), (gi.node_child, SegmentLabel.NODE_C)]
    parent_block = [(NODE_P, SegmentLabel.MARKER), (gi.node_parent, SegmentLabel.NODE_P)]
    edge_block = [(EDGE, SegmentLabel.MARKER), (gi.edge, SegmentLabel.EDGE)]
    if gi.direction is EdgeDirection.CHILD_TO_PARENT:
        middle = child_block + edge_block + parent_block
    else:
        middle = parent_block + edge_block + child_block

    pieces: list[tuple[str, SegmentLabel]] = [(BOS, SegmentLabel.MARKER), (gi.sentence, SegmentLabel.CONTEXT)]
    pieces += middle
    if gi.rewrite_type is not None:
        pieces += [(TYPE, SegmentLabel.MARKER), (gi.rewrite_type.value, SegmentLabel.TYPE)]
        pieces += [(SUBQ, SegmentLabel.MARKER), (gi.sub_question, SegmentLabel.SUBQ)]
    pieces.append((EOS, SegmentLabel.MARKER))

    tokens: list[str] = []
    labels: list[SegmentLabel] = []
    spans: dict[SegmentLabel, tuple[int, int]] = {}
    for text, label in pieces:
        chunk = text.split(" ")
        start = len(tokens)
        tokens.extend(chunk)
        labels.extend([label] * len(chunk))
        if label in (SegmentLabel.CONTEXT, SegmentLabel.SUBQ):
            spans[label] = (start, len(tokens))

    alias_seqs = _parent_alias_token_seqs(gi)
    for label in (SegmentLabel.CONTEXT, SegmentLabel.SUBQ):
        if label in spans:
            lo, hi = spans[label]
            _relabel_parent_tokens(tokens, labels, lo, hi, alias_seqs)
    return " ".join(tokens), labels


def serialize_input(gi: GeneratorInput) -> str:
    return gi.text


def parse_input(
    text: str, step: int = 0, parent_aliases: tuple[str, ...] = ()
) -> GeneratorInput:
    """Invert serialization; raises AssemblyError on malformed sequences."""
    tokens = text.split(" ")
    positions: dict[str, int] = {}
    for i, tok in enumerate(tokens):
        if tok in MARKERS:
            if tok in positions:
                raise AssemblyError(f"marker {tok} occurs more than once")
            positions[tok] = i
    for required in (BOS, NODE_C, EDGE, NODE_P, EOS):
        if required not in positions:
            raise AssemblyError(f"marker {required} missing")
    if positions[BOS] != 0 or positions[EOS] != len(tokens) - 1:
        raise AssemblyError("sequence must start with <bos> and end with <eos>")
    if (TYPE in positions) != (SUBQ in positions):
        raise AssemblyError("<type> and <subq> must appear together")

    direction = (
        EdgeDirection.CHILD_TO_PARENT if positions[NODE_C] < positions[NODE_P] else EdgeDirection.PARENT_TO_CHILD
    )
    first_node = min(positions[NODE_C], positions[NODE_P])
    second_node = max(positions[NODE_C], positions[NODE_P])
    if not (positions[BOS] < first_node < positions[EDGE] < second_node):
        raise AssemblyError("node and edge blocks out of order")
    if TYPE in positions and not (second_node < positions[TYPE] < positions[SUBQ] < positions[EOS]):
        raise AssemblyError("type and sub-question blocks out of order")

    bounds = sorted(positions.values())

    def between(marker: str) -> str:
        start = positions[marker] + 1
        end = min(b for b in bounds if b > positions[marker])
        piece = " ".join(tokens[start:end])
        if not piece:
            raise AssemblyError(f"empty block after {marker}")
        return piece

    rewrite_type = None
    sub_question = None
    if TYPE in positions:
        try:
            rewrite_type = RewriteType(between(TYPE))
        except ValueError as exc:
            raise AssemblyError(f"unknown rewrite type {between(TYPE)!r}") from exc
        sub_question = between(SUBQ)
    return GeneratorInput(
        step=step,
        sentence=between(BOS),
        node_child=between(NODE_C),
        edge=between(EDGE),
        node_parent=between(NODE_P),
        direction=direction,
        rewrite_type=rewrite_type,
        sub_question=sub_question,
        parent_aliases=parent_aliases,
    )


def assemble_initial_input(
    node_child: str,
    node_parent: str,
    sentence: str,
    edge: str,
    direction: EdgeDirection,
    parent_aliases: tuple[str, ...] = (),
) -> GeneratorInput:
    """Step-1 input: no type or sub-question block."""
    return GeneratorInput(
        step=1,
        sentence=sentence,
        node_child=node_child,
        edge=edge,
        node_parent=node_parent,
        direction=direction,
        parent_aliases=parent_aliases,
    )


def assemble_rewrite_input(
    q_prev: str,
    node_child: str,
    node_parent: str,
    sentence: str,
    edge: str,
    rewrite_type: RewriteType,
    direction: EdgeDirection,
    step: int,
    parent_aliases: tuple[str, ...] = (),
) -> GeneratorInput:
    """Step-i (i >= 2) input carrying the previous question and rewrite type."""
    if not collapse(q_prev):
        raise AssemblyError("previous question is empty")
    return GeneratorInput(
        step=step,
        sentence=sentence,
        node_child=node_child,
        edge=edge,
        node_parent=node_parent,
        direction=direction,
        rewrite_type=rewrite_type,
        sub_question=q_prev,
        parent_aliases=parent_aliases,
    )

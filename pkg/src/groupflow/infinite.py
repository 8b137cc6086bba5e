"""Semi-decision of flow existence on periodic infinite graphs.

A graph has an A-flow iff every finite contraction does, so a single
exhaustion quotient G_n without an A-flow proves that none exists. The
converse direction can only be observed up to a depth.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .contraction import ContractedGraph, ContractionMap, contract, contract_sides, exhaustion_quotient
from .corpus import graph_certificate, petersen
from .flows import EdgeAssignment, find_flow
from .graph import Multigraph
from .groups import FlowAlphabet, alphabet_nonzero, parse_group
from .presentation import PeriodicPresentation, PresentationError

DEFAULT_MAX_DEPTH = 16

FIXTURES = ("ladder_fig1_1", "petersen_chain_fig3_1_1", "double_ray", "infinite_ladder")


def fixture_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    return Path(str(resources.files("groupflow") / "fixtures" / f"{stem}.json"))


def load_fixture(name: str) -> PeriodicPresentation:
    return PeriodicPresentation.load(fixture_path(name))


def load_presentation(name_or_path: str | Path) -> PeriodicPresentation:
    """A presentation file, or the name of a bundled fixture."""
    path = Path(name_or_path)
    if path.exists():
        return PeriodicPresentation.load(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in FIXTURES:
        return load_fixture(stem)
    raise PresentationError(f"no presentation file or bundled fixture named {str(name_or_path)!r}")


def alphabet_to_json(a: FlowAlphabet) -> dict:
    return {"group": a.group.label, "elements": [list(x.coords) for x in a.elements]}


def alphabet_from_json(data: dict) -> FlowAlphabet:
    group = parse_group(data["group"])
    return FlowAlphabet(group, tuple(group.element(tuple(x)) for x in data["elements"]))


@dataclass(frozen=True)
class ObstructionCertificate:
    """A depth n whose quotient G_n has no A-flow.

    ``cut_family`` realizes G_n as a contraction of the infinite graph: one
    singleton cut per vertex of S_n and one cut per tail component.
    """

    depth: int
    alphabet: FlowAlphabet
    quotient: Multigraph
    cut_family: tuple
    contraction: ContractionMap
    transcript: tuple[str, ...]
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {
            "depth": self.depth,
            "alphabet": alphabet_to_json(self.alphabet),
            "quotient": self.quotient.to_json(),
            "cut_family": list(self.cut_family),
            "contraction": self.contraction.to_json(),
            "transcript": list(self.transcript),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @classmethod
    def from_json(cls, data: dict) -> ObstructionCertificate:
        cmap = data["contraction"]
        return cls(
            depth=int(data["depth"]),
            alphabet=alphabet_from_json(data["alphabet"]),
            quotient=Multigraph.from_json(data["quotient"]),
            cut_family=tuple(data["cut_family"]),
            contraction=ContractionMap(
                {v: w for v, w in cmap["vertex_map"]}, frozenset(cmap.get("dropped", [])), cmap.get("tails", {})
            ),
            transcript=tuple(data.get("transcript", [])),
            witness=data.get("witness"),
        )


@dataclass(frozen=True)
class No:
    certificate: ObstructionCertificate

    verdict = "no"

    @property
    def depth(self) -> int:
        return self.certificate.depth


@dataclass(frozen=True)
class YesUpTo:
    """Every quotient up to ``depth`` has an A-flow; not a proof of existence."""

    depth: int
    flows: tuple = field(default=(), compare=False, repr=False)

    verdict = "yes-up-to"
    note = "every exhaustion quotient up to this depth has a flow; this does not prove a flow exists"


def certificate_cut_family(q: ContractedGraph, cmap: ContractionMap, depth: int) -> tuple:
    cuts = []
    for v in q.quotient.vertices:
        if v in cmap.tails:
            cuts.append({"tail": v, "depth": depth})
        else:
            cuts.append({"side": [v]})
    return tuple(cuts)


def check_infinite(
    p: PeriodicPresentation,
    a: FlowAlphabet,
    max_depth: int = DEFAULT_MAX_DEPTH,
    threads: int = 1,
    keep_flows: bool = False,
):
    """No(certificate) at the first depth whose quotient has no A-flow, else YesUpTo."""
    if max_depth < 0:
        raise PresentationError("max_depth must be >= 0")
    flows = []
    transcript = []
    for n in range(max_depth + 1):
        q, cmap = exhaustion_quotient(p, n)
        g = q.quotient
        f = find_flow(g, a, threads=threads)
        line = f"depth {n}: quotient with {len(g.vertices)} vertices and {len(g.edges)} edges"
        if f is None:
            transcript.append(f"{line}; exhaustive search finds no {_alpha_name(a)}")
            cert = ObstructionCertificate(
                depth=n,
                alphabet=a,
                quotient=g,
                cut_family=certificate_cut_family(q, cmap, n),
                contraction=cmap,
                transcript=tuple(transcript),
            )
            return No(cert)
        transcript.append(f"{line}; flow found")
        if keep_flows:
            flows.append(f)
    return YesUpTo(max_depth, tuple(flows))


def _alpha_name(a: FlowAlphabet) -> str:
    return f"non-elusive {a.group.label}-flow" if a.non_elusive else f"{a.group.label} A-flow"


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def replay_certificate(cert: ObstructionCertificate, p: PeriodicPresentation | None = None) -> ReplayResult:
    """Re-run the search on the stored quotient; with ``p`` also rebuild it.

    With the presentation at hand this checks that the stored quotient is
    G_n and that contracting the infinite graph by the stored cut family
    gives the same multigraph up to the stored vertex naming.
    """
    reasons = []
    if find_flow(cert.quotient, cert.alphabet) is not None:
        reasons.append("stored quotient has a flow")
    if p is not None:
        q, _ = exhaustion_quotient(p, cert.depth)
        if q.quotient != cert.quotient:
            reasons.append(f"stored quotient differs from the depth-{cert.depth} exhaustion quotient")
        cq, cmap = contract(p, cert.cut_family)
        words = {v: cmap(v) for v in cert.quotient.vertices}
        if len(set(words.values())) != len(words):
            reasons.append("cut family merges vertices of the stored quotient")
        renamed = sorted((e, *sorted((words[u], words[v]))) for e, u, v in cert.quotient.edges)
        realized = sorted((e, *sorted((u, v))) for e, u, v in cq.quotient.edges)
        if renamed != realized:
            reasons.append("cut family does not realize the stored quotient")
    return ReplayResult(not reasons, tuple(reasons))


# -- contraction witnesses ------------------------------------------------------------


def merge_witness(g: Multigraph, target: Multigraph, max_block: int = 3):
    """A connected vertex set whose contraction (loops removed) is isomorphic to ``target``.

    Tries blocks of size 2..max_block in vertex order; returns the quotient
    and its contraction map, or None.
    """
    need = len(g.vertices) - len(target.vertices) + 1
    if need < 2 or need > max_block:
        return None
    want = graph_certificate(target)
    for block in itertools.combinations(g.vertices, need):
        inner = g.edge_subgraph([e for e, u, v in g.edges if u in block and v in block], keep_vertices=False)
        if len(inner.vertices) != need or not inner.is_connected:
            continue
        block_set = frozenset(block)
        sides = [block_set] + [frozenset([v]) for v in g.vertices if v not in block_set]
        q, cmap = contract_sides(g, sides)
        loopless = q.quotient.without_loops()
        if graph_certificate(loopless) == want:
            return q, cmap, block
    return None


def check_infinite_z4_petersen_chain(max_depth: int = 4) -> No | YesUpTo:
    """The bundled Petersen chain has no non-elusive Z4-flow.

    The certificate carries a witness: a block of the obstruction quotient
    whose contraction turns it into the Petersen graph.
    """
    p = load_fixture("petersen_chain_fig3_1_1")
    result = check_infinite(p, alphabet_nonzero(parse_group("Z4")), max_depth)
    if not isinstance(result, No):
        return result
    cert = result.certificate
    found = merge_witness(cert.quotient, petersen())
    if found is None:
        return result
    q, cmap, block = found
    witness = {
        "target": "petersen",
        "merged": list(block),
        "quotient": q.quotient.without_loops().to_json(),
        "vertex_map": [[v, w] for v, w in cmap.vertex_map.items()],
    }
    transcript = cert.transcript + (
        f"contracting {sorted(block)} yields the Petersen graph, which has no non-elusive Z4-flow",
    )
    return No(
        ObstructionCertificate(
            cert.depth, cert.alphabet, cert.quotient, cert.cut_family, cert.contraction, transcript, witness
        )
    )


def flows_to_json(flows: tuple[EdgeAssignment, ...]) -> list:
    return [f.to_json() for f in flows]


def certificate_dumps(cert: ObstructionCertificate) -> str:
    return json.dumps(cert.to_json(), sort_keys=True, separators=(",", ":"))

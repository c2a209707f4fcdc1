"""Arithmetic and Boolean circuit DAGs.

Nodes live in a topologically ordered list (children always precede their
parents), gates may be n-ary so depth-3 sum-of-product-of-sums circuits
are literally three layers. Circuits are immutable values once built.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import MissingVariable, NotMonotone, TermBudgetExceeded
from .poly import SparsePoly, coeff_from_str, coeff_str
from .seeding import stream_rng

DEFAULT_TERM_CAP = 2_000_000


def term_cap_default():
    cap = os.environ.get("MONOFORGE_TERM_CAP")
    return int(cap) if cap else DEFAULT_TERM_CAP


class ArithCircuit:
    """DAG of input / const / add / mul nodes with a single output."""

    __slots__ = ("nodes", "output")

    def __init__(self, nodes, output):
        self.nodes = list(nodes)
        self.output = output
        for idx, (op, arg) in enumerate(self.nodes):
            if op in ("add", "mul"):
                if not arg or any(c >= idx or c < 0 for c in arg):
                    raise ValueError("children must precede their gate")
            elif op not in ("in", "const"):
                raise ValueError(f"unknown op {op!r}")
        if not (0 <= output < len(self.nodes)):
            raise ValueError("output out of range")

    def input_vars(self):
        return {arg for op, arg in self.nodes if op == "in"}

    def monotone(self):
        """True iff every constant in the circuit is nonnegative."""
        return all(arg >= 0 for op, arg in self.nodes if op == "const")

    def gate_count(self):
        return len(self.nodes)

    def wire_count(self):
        return sum(len(arg) for op, arg in self.nodes if op in ("add", "mul"))

    def syntactic_degree(self):
        deg = [0] * len(self.nodes)
        for i, (op, arg) in enumerate(self.nodes):
            if op == "in":
                deg[i] = 1
            elif op == "const":
                deg[i] = 0
            elif op == "add":
                deg[i] = max(deg[c] for c in arg)
            else:
                deg[i] = sum(deg[c] for c in arg)
        return deg[self.output]

    def depth(self):
        dep = [0] * len(self.nodes)
        for i, (op, arg) in enumerate(self.nodes):
            if op in ("add", "mul"):
                dep[i] = 1 + max(dep[c] for c in arg)
        return dep[self.output]

    def to_json(self):
        nodes = []
        for i, (op, arg) in enumerate(self.nodes):
            if op == "in":
                nodes.append({"id": i, "op": "in", "var": arg})
            elif op == "const":
                nodes.append({"id": i, "op": "const", "c": coeff_str(arg)})
            else:
                nodes.append({"id": i, "op": op, "args": list(arg)})
        return {"nodes": nodes, "output": self.output}

    @classmethod
    def from_json(cls, obj):
        remap = {}
        nodes = []
        for pos, nd in enumerate(obj["nodes"]):
            remap[nd["id"]] = pos
            op = nd["op"]
            if op == "in":
                nodes.append(("in", int(nd["var"])))
            elif op == "const":
                nodes.append(("const", coeff_from_str(nd["c"])))
            elif op in ("add", "mul"):
                nodes.append((op, tuple(remap[c] for c in nd["args"])))
            else:
                raise ValueError(f"unknown op {op!r}")
        return cls(nodes, remap[obj["output"]])


class CircuitBuilder:
    """Append-only builder; node ids are topological by construction."""

    def __init__(self):
        self.nodes = []
        self._cache = {}

    def _emit(self, node):
        cached = self._cache.get(node)
        if cached is not None:
            return cached
        self.nodes.append(node)
        idx = len(self.nodes) - 1
        self._cache[node] = idx
        return idx

    def var(self, v):
        return self._emit(("in", int(v)))

    def const(self, c):
        if isinstance(c, Fraction) and c.denominator == 1:
            c = c.numerator
        return self._emit(("const", c))

    def add(self, children):
        return self._emit(("add", tuple(children)))

    def mul(self, children):
        return self._emit(("mul", tuple(children)))

    def build(self, output):
        return ArithCircuit(self.nodes, output)


def eval_circuit(circuit, assignment):
    """Exact value of the circuit at a var-id -> rational assignment."""
    vals = [0] * len(circuit.nodes)
    for i, (op, arg) in enumerate(circuit.nodes):
        if op == "in":
            if arg not in assignment:
                raise MissingVariable(f"variable {arg} unassigned")
            vals[i] = assignment[arg]
        elif op == "const":
            vals[i] = arg
        elif op == "add":
            total = 0
            for c in arg:
                total = total + vals[c]
            vals[i] = total
        else:
            total = 1
            for c in arg:
                total = total * vals[c]
            vals[i] = total
    return vals[circuit.output]


def expand_circuit(circuit, term_cap=None):
    """Exact sparse polynomial computed by the circuit.

    Fails safely with TermBudgetExceeded once any intermediate polynomial
    holds more than `term_cap` terms.
    """
    cap = term_cap if term_cap is not None else term_cap_default()
    polys = [None] * len(circuit.nodes)
    for i, (op, arg) in enumerate(circuit.nodes):
        if op == "in":
            p = SparsePoly.variable(arg)
        elif op == "const":
            p = SparsePoly.const(arg)
        elif op == "add":
            acc = {}
            for c in arg:
                for mono, co in polys[c].terms.items():
                    c0 = acc.get(mono, 0) + co
                    if c0:
                        acc[mono] = c0
                    elif mono in acc:
                        del acc[mono]
                if len(acc) > cap:
                    raise TermBudgetExceeded(cap)
            p = SparsePoly(acc, _trusted=True)
        else:
            p = SparsePoly.const(1)
            for c in arg:
                p = p * polys[c]
                if p.num_terms() > cap:
                    raise TermBudgetExceeded(cap)
        polys[i] = p
    return polys[circuit.output]


@dataclass
class IdentityVerdict:
    equal_whp: bool
    witness: dict | None = None

    def __bool__(self):
        return self.equal_whp


def random_identity_test(circuit, p, trials, seed):
    """Probabilistic identity test between a circuit and a sparse polynomial.

    Evaluates both sides at `trials` points with integer coordinates drawn
    uniformly from [0, 2*deg*trials*nvars]; a nonzero difference polynomial
    of that degree vanishes at such a point with probability < 1/(2*trials),
    so a false 'equal' verdict has probability < 1/2 overall.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vars_all = circuit.input_vars() | p.variables()
    deg = max(circuit.syntactic_degree(), p.total_degree(), 1)
    bound = 2 * deg * trials * max(len(vars_all), 1)
    rng = stream_rng(seed, "identity-test")
    for _ in range(trials):
        point = {v: rng.randint(0, bound) for v in sorted(vars_all)}
        if eval_circuit(circuit, point) != p.evaluate(point):
            return IdentityVerdict(False, point)
    return IdentityVerdict(True)


class BoolCircuit:
    """Monotone Boolean DAG: input / const / and / or nodes, single output."""

    __slots__ = ("nodes", "output")

    def __init__(self, nodes, output):
        self.nodes = list(nodes)
        self.output = output
        for idx, (op, arg) in enumerate(self.nodes):
            if op in ("and", "or"):
                if not arg or any(c >= idx or c < 0 for c in arg):
                    raise ValueError("children must precede their gate")
            elif op == "const":
                if arg not in (0, 1):
                    raise ValueError("Boolean constant must be 0 or 1")
            elif op != "in":
                raise ValueError(f"unknown op {op!r}")
        if not (0 <= output < len(self.nodes)):
            raise ValueError("output out of range")

    def input_vars(self):
        return {arg for op, arg in self.nodes if op == "in"}

    def gate_count(self):
        return len(self.nodes)

    def max_fanin(self):
        return max((len(arg) for op, arg in self.nodes if op in ("and", "or")), default=0)

    def to_json(self):
        nodes = []
        for i, (op, arg) in enumerate(self.nodes):
            if op == "in":
                nodes.append({"id": i, "op": "in", "var": arg})
            elif op == "const":
                nodes.append({"id": i, "op": "const", "c": arg})
            else:
                nodes.append({"id": i, "op": op, "args": list(arg)})
        return {"nodes": nodes, "output": self.output}

    @classmethod
    def from_json(cls, obj):
        remap = {}
        nodes = []
        for pos, nd in enumerate(obj["nodes"]):
            remap[nd["id"]] = pos
            op = nd["op"]
            if op == "in":
                nodes.append(("in", int(nd["var"])))
            elif op == "const":
                nodes.append(("const", int(nd["c"])))
            elif op in ("and", "or"):
                nodes.append((op, tuple(remap[c] for c in nd["args"])))
            else:
                raise ValueError(f"unknown op {op!r}")
        return cls(nodes, remap[obj["output"]])


def eval_bool(circuit, bits):
    """Evaluate a BoolCircuit; `bits` maps var-id -> 0/1 (dict or sequence)."""
    get = bits.__getitem__
    vals = [0] * len(circuit.nodes)
    for i, (op, arg) in enumerate(circuit.nodes):
        if op == "in":
            vals[i] = 1 if get(arg) else 0
        elif op == "const":
            vals[i] = arg
        elif op == "and":
            vals[i] = 1 if all(vals[c] for c in arg) else 0
        else:
            vals[i] = 1 if any(vals[c] for c in arg) else 0
    return vals[circuit.output]


def booleanize(circuit):
    """Monotone arithmetic circuit -> Boolean circuit deciding positivity.

    add becomes OR, mul becomes AND, positive constants become true and
    zero constants false; on 0/1 inputs the result equals [value > 0].
    """
    nodes = []
    for op, arg in circuit.nodes:
        if op == "in":
            nodes.append(("in", arg))
        elif op == "const":
            if arg < 0:
                raise NotMonotone(f"constant {arg} is negative")
            nodes.append(("const", 1 if arg > 0 else 0))
        elif op == "add":
            nodes.append(("or", arg))
        else:
            nodes.append(("and", arg))
    return BoolCircuit(nodes, circuit.output)

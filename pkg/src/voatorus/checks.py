"""Uniform pass/fail records for the verification routines."""
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    name: str
    anchor: str
    passed: bool
    orders: dict = field(default_factory=dict)
    compared: int = 0
    first_mismatch: object = None
    details: dict = field(default_factory=dict)
    truncated: bool = False

    def __bool__(self):
        return self.passed

    def to_json(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "status": "pass" if self.passed else "fail",
            "orders": {k: _plain(v) for k, v in self.orders.items()},
            "compared": self.compared,
            "first_mismatch": _plain(self.first_mismatch),
            "details": {k: _plain(v) for k, v in self.details.items()},
            "truncated": self.truncated,
        }


def _plain(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return str(x)


def vec_str(v):
    """Readable, deterministic text form of a sparse vector."""
    if not v:
        return "0"
    return " + ".join("(%s)*%s" % (c, _state_str(s)) for s, c in sorted(v.items(), key=lambda t: repr(t[0])))


def _state_str(s):
    return repr(s).replace("Fraction", "").replace(" ", "")

"""Finite-dimensional model spaces for monomial and Blaschke inner functions.

A model space is the orthogonal complement of alpha*H^2 inside H^2.  For
alpha = z^N the space is spanned exactly by 1, z, ..., z^{N-1}; for a finite
Blaschke product with distinct zeros we use the Takenaka-Malmquist basis,
stored as Taylor expansions truncated at a certified order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .laurent import LaurentPoly, conj_on_circle, decimate

# Exact-backend comparisons; Blaschke-backend comparisons are 1e-8 throughout.
EXACT_TOL = 1e-12
BLASCHKE_TOL = 1e-8
GRAM_TOL = 1e-10
TAIL_BOUND_LIMIT = 1e-12
ZERO_SEPARATION = 1e-10
CIRCLE_GRID = 64


class TruncationError(Exception):
    """Raised when a requested truncation order cannot certify the tail."""


@dataclass(frozen=True)
class InnerFunction:
    """Either z^N or a finite Blaschke product with distinct zeros in the disk."""

    kind: str  # "monomial" | "blaschke"
    degree: int
    zeros: tuple = ()
    constant: complex = 1.0 + 0j

    @classmethod
    def monomial(cls, degree: int) -> "InnerFunction":
        degree = int(degree)
        if degree < 1:
            raise ValueError(f"monomial degree must be >= 1, got {degree}")
        return cls(kind="monomial", degree=degree)

    @classmethod
    def blaschke(cls, zeros, constant: complex = 1.0) -> "InnerFunction":
        zeros = tuple(complex(w) for w in zeros)
        if not zeros:
            raise ValueError("Blaschke product needs at least one zero")
        for w in zeros:
            if abs(w) >= 1.0:
                raise ValueError(f"Blaschke zero {w} is not inside the open disk")
        for i, w in enumerate(zeros):
            for v in zeros[i + 1 :]:
                if abs(w - v) < ZERO_SEPARATION:
                    raise ValueError(f"Blaschke zeros {w} and {v} are not separated")
        constant = complex(constant)
        if abs(abs(constant) - 1.0) > 1e-8:
            raise ValueError(f"Blaschke constant must be unimodular, got |c|={abs(constant)}")
        constant /= abs(constant)
        inner = cls(kind="blaschke", degree=len(zeros), zeros=zeros, constant=constant)
        inner._check_unimodular_on_circle()
        return inner

    def _check_unimodular_on_circle(self):
        for z in circle_grid():
            if abs(abs(self.evaluate(z)) - 1.0) > BLASCHKE_TOL:
                raise ValueError("inner function is not unimodular on the circle")

    @property
    def dim(self) -> int:
        """Dimension of the attached model space."""
        return self.degree

    def evaluate(self, z: complex) -> complex:
        if self.kind == "monomial":
            return z**self.degree
        val = self.constant
        for w in self.zeros:
            val *= (z - w) / (1.0 - w.conjugate() * z)
        return val

    def to_laurent(self, order: int) -> LaurentPoly:
        """Taylor expansion truncated at the given order (exact for monomials)."""
        if self.kind == "monomial":
            return LaurentPoly.monomial(self.degree)
        poly = LaurentPoly.constant(self.constant)
        for w in self.zeros:
            # (z - w) / (1 - conj(w) z) expanded as (z - w) * sum conj(w)^n z^n.
            wc = w.conjugate()
            geo = LaurentPoly({n: wc**n for n in range(order + 1)})
            factor = (LaurentPoly.monomial(1) - LaurentPoly.constant(w)) * geo
            poly = (poly * factor).truncated(0, order)
        return poly

    def stretched(self, k: int) -> "InnerFunction":
        """The inner function z -> alpha(z^k)."""
        k = int(k)
        if k < 1:
            raise ValueError(f"order must be >= 1, got {k}")
        if self.kind == "monomial":
            return InnerFunction.monomial(k * self.degree)
        roots = []
        for w in self.zeros:
            if abs(w) < ZERO_SEPARATION:
                raise ValueError(
                    "cannot stretch a Blaschke product with a zero at the origin "
                    "(the result would have a repeated zero)"
                )
            r = abs(w) ** (1.0 / k)
            theta = cmath.phase(w)
            roots.extend(r * cmath.exp(1j * (theta + 2 * math.pi * j) / k) for j in range(k))
        return InnerFunction.blaschke(roots, self.constant)

    def backend_tol(self) -> float:
        return EXACT_TOL if self.kind == "monomial" else BLASCHKE_TOL

    def to_json(self) -> dict:
        if self.kind == "monomial":
            return {"type": "monomial", "degree": self.degree}
        return {
            "type": "blaschke",
            "zeros": [{"re": w.real, "im": w.imag} for w in self.zeros],
            "constant": {"re": self.constant.real, "im": self.constant.imag},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InnerFunction":
        if not isinstance(obj, dict) or "type" not in obj:
            raise ValueError("expected an object with a 'type' field")
        if obj["type"] == "monomial":
            return cls.monomial(obj["degree"])
        if obj["type"] == "blaschke":
            zeros = [complex(float(w["re"]), float(w.get("im", 0.0))) for w in obj["zeros"]]
            c = obj.get("constant", {"re": 1.0, "im": 0.0})
            return cls.blaschke(zeros, complex(float(c["re"]), float(c.get("im", 0.0))))
        raise ValueError(f"unknown inner function type {obj['type']!r}")

    @classmethod
    def parse(cls, text: str) -> "InnerFunction":
        """Accept the inline shorthand 'z^N' or a JSON object string."""
        text = text.strip()
        if text.startswith("z^"):
            return cls.monomial(int(text[2:]))
        if text == "z":
            return cls.monomial(1)
        import json

        return cls.from_json(json.loads(text))


def circle_grid(count: int = CIRCLE_GRID):
    return [cmath.exp(2j * math.pi * t / count) for t in range(count)]


def default_truncation(inner: InnerFunction) -> int:
    if inner.kind == "monomial":
        return inner.degree
    rho = max(abs(w) for w in inner.zeros)
    t = 1
    while rho ** (t + 1) / (1.0 - rho) > TAIL_BOUND_LIMIT:
        t += 1
    return max(64, t)


def coeff_json(coords: np.ndarray) -> dict:
    return {"coords": [[z.real, z.imag] for z in np.asarray(coords, dtype=complex)]}


def coeff_from_json(obj: dict) -> np.ndarray:
    if not isinstance(obj, dict) or "coords" not in obj:
        raise ValueError("expected an object with a 'coords' list")
    return np.array([complex(float(re), float(im)) for re, im in obj["coords"]], dtype=complex)


@dataclass
class ModelSpaceBasis:
    """Ordered orthonormal basis of a model space, with certified truncation."""

    inner: InnerFunction
    vectors: list  # LaurentPoly expansions, analytic, truncated at truncation_order
    truncation_order: int
    tail_bound: float
    _alpha_expansion: LaurentPoly = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, inner: InnerFunction, truncation: int | None = None) -> "ModelSpaceBasis":
        if truncation is None:
            truncation = default_truncation(inner)
        truncation = int(truncation)
        if inner.kind == "monomial":
            vectors = [LaurentPoly.monomial(j) for j in range(inner.degree)]
            basis = cls(inner, vectors, truncation_order=inner.degree, tail_bound=0.0)
        else:
            rho = max(abs(w) for w in inner.zeros)
            tail = rho ** (truncation + 1) / (1.0 - rho)
            if tail > TAIL_BOUND_LIMIT:
                raise TruncationError(
                    f"truncation order {truncation} leaves tail bound {tail:.3e} "
                    f"above {TAIL_BOUND_LIMIT:.0e}"
                )
            vectors = _takenaka_malmquist(inner, truncation)
            basis = cls(inner, vectors, truncation_order=truncation, tail_bound=tail)
        basis._check_gram()
        return basis

    def _check_gram(self):
        gram = np.array(
            [[self.vectors[i].inner(self.vectors[j]) for j in range(self.dim)] for i in range(self.dim)]
        )
        err = np.abs(gram - np.eye(self.dim)).max()
        if err > GRAM_TOL:
            raise TruncationError(f"basis Gram matrix deviates from identity by {err:.3e}")

    def alpha_expansion(self) -> LaurentPoly:
        """Expansion of the inner function itself, long enough for projections."""
        if self._alpha_expansion is None:
            order = self.truncation_order if self.inner.kind == "monomial" else 2 * self.truncation_order + 2
            self._alpha_expansion = self.inner.to_laurent(order)
        return self._alpha_expansion

    # -- core maps ---------------------------------------------------------

    def project(self, f: LaurentPoly) -> np.ndarray:
        """Coordinates of the orthogonal projection of f onto the model space."""
        return np.array([f.inner(e) for e in self.vectors], dtype=complex)

    def reconstruct(self, coords) -> LaurentPoly:
        out = LaurentPoly.zero()
        for c, e in zip(np.asarray(coords, dtype=complex), self.vectors):
            out = out + complex(c) * e
        return out

    def kernel(self, w: complex, n: int = 0) -> np.ndarray:
        """Coordinates of the kernel representing f -> f^(n)(w)."""
        w = complex(w)
        if abs(w) >= 1.0:
            raise ValueError(f"kernel point {w} must lie in the open disk")
        if n < 0:
            raise ValueError("derivative order must be nonnegative")
        return np.array([e.derivative_at(w, n) for e in self.vectors], dtype=complex).conjugate()

    def conjugate_vector(self, coords) -> np.ndarray:
        """The antilinear involution f -> alpha * conj(z f) in coordinates."""
        coords = np.asarray(coords, dtype=complex)
        if self.inner.kind == "monomial":
            return coords[::-1].conjugate()
        g = self.reconstruct(coords)
        h = self.alpha_expansion() * conj_on_circle(g) * LaurentPoly.monomial(-1)
        return self.project(h)

    def conjugation_matrix(self) -> np.ndarray:
        """Matrix C with coords(C f) = C @ conj(coords(f))."""
        mat = np.empty((self.dim, self.dim), dtype=complex)
        for j in range(self.dim):
            unit = np.zeros(self.dim, dtype=complex)
            unit[j] = 1.0
            mat[:, j] = self.conjugate_vector(unit)
        return mat

    def compressed_shift(self) -> tuple[np.ndarray, np.ndarray]:
        """Matrix of the compression of multiplication by z, and its adjoint."""
        z = LaurentPoly.monomial(1)
        mat = np.array(
            [[(z * self.vectors[j]).inner(self.vectors[i]) for j in range(self.dim)] for i in range(self.dim)]
        )
        return mat, mat.conjugate().T

    def backend_tol(self) -> float:
        return self.inner.backend_tol()


def _takenaka_malmquist(inner: InnerFunction, order: int) -> list:
    """Orthonormal rational basis for distinct zeros, in zero-list order."""
    vectors = []
    carried = LaurentPoly.constant(1.0)  # product of previous Blaschke factors
    for w in inner.zeros:
        wc = w.conjugate()
        geo = LaurentPoly({n: wc**n for n in range(order + 1)})
        head = math.sqrt(1.0 - abs(w) ** 2) * geo
        vectors.append((head * carried).truncated(0, order))
        factor = (LaurentPoly.monomial(1) - LaurentPoly.constant(w)) * geo
        carried = (carried * factor).truncated(0, order)
    return vectors


def make_basis(inner: InnerFunction, truncation: int | None = None) -> ModelSpaceBasis:
    return ModelSpaceBasis.build(inner, truncation)


def stretch_inner(inner: InnerFunction, k: int) -> InnerFunction:
    return inner.stretched(k)


def project_decimation_intertwined(basis: ModelSpaceBasis, f: LaurentPoly, k: int) -> LaurentPoly:
    """Cross-check route: decimate after projecting onto the stretched space."""
    stretched = make_basis(stretch_inner(basis.inner, k), None)
    return decimate(stretched.reconstruct(stretched.project(f)), k)


__all__ = [
    "InnerFunction",
    "ModelSpaceBasis",
    "TruncationError",
    "make_basis",
    "stretch_inner",
    "default_truncation",
    "circle_grid",
    "coeff_json",
    "coeff_from_json",
    "EXACT_TOL",
    "BLASCHKE_TOL",
]

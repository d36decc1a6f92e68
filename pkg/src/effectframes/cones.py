"""Positive cones over effect families and the intersection-span certificate.

The positive cone of a finite operator family is the set of nonnegative
linear combinations of its members.  Three facts are made executable here:
every effect decomposes spectrally into the cone of the augmented basis
built from its own eigenvectors, with at most d nonzero coefficients; the
operator E_delta = I/d + delta * (tail sum) is an interior point of that
cone at a controlled distance from I/d; and around E_delta a whole ball
lies in the intersection of the augmented-basis cone and any MIC-POM cone,
from which d**2 linearly independent common elements are harvested.  The
harvest is returned as a re-checkable certificate.

Cone membership queries run nonnegative least squares on the real
coordinate system of the family and treat the optimum as a certificate
when its residual is below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .operators import (
    DEFAULT_TOL,
    DimensionMismatchError,
    HermitianOperator,
    OperatorBasis,
    ToleranceConfig,
    eig_hermitian,
    hs_distance,
    identity,
    operator_from_jsonable,
    operator_to_jsonable,
    orthonormal_operator_basis,
    real_coordinates,
)
from .effects import (
    Effect,
    MicPom,
    NotAnEffectError,
    is_effect,
    pom_from_jsonable,
    pom_to_jsonable,
)
from .augmented import AugmentedBasis, augmented_basis_from_onb, validate_augmented

__all__ = [
    "CertificateError",
    "CertificateReport",
    "ConeDecomposition",
    "EpsilonTooLargeError",
    "SpanCertificate",
    "certificate_from_jsonable",
    "certificate_to_jsonable",
    "cone_decompose_spectral",
    "cone_membership",
    "interior_point_Edelta",
    "intersection_span_certificate",
    "verify_certificate",
]


class EpsilonTooLargeError(ValueError):
    """Requested ball radius pushes the interior point outside the effects."""

    def __init__(self, message: str, witness: float):
        super().__init__(message)
        self.witness = witness


class CertificateError(RuntimeError):
    """Certificate construction or verification failed; carries the stage."""


@dataclass(frozen=True, eq=False)
class ConeDecomposition:
    """Nonnegative coordinates of an operator over a basis of effects."""

    basis: OperatorBasis
    coeffs: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (len(self.basis),):
            raise ValueError(
                f"expected {len(self.basis)} coefficients, got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def recombine(self) -> HermitianOperator:
        d = self.basis.dim
        acc = np.zeros((d, d), dtype=np.complex128)
        for cj, op in zip(self.coeffs, self.basis.elements):
            acc += cj * op.mat
        return HermitianOperator(acc)

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.coeffs > 0.0))


def cone_decompose_spectral(
    e: Effect, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[AugmentedBasis, ConeDecomposition]:
    """Decompose an effect over the augmented basis of its own eigenvectors.

    The eigendecomposition E = sum lambda_j |v_j><v_j| rewrites as
    sum (lambda_j / c) B_j over the first d elements B_j = c |v_j><v_j| of
    the augmented basis grown from the eigenvector family; the remaining
    d**2 - d coefficients vanish.  Eigenvalues inside the negative slack
    are clamped to zero so the coefficients come out nonnegative by
    construction.
    """
    d = e.dim
    w, v = eig_hermitian(e.op, tol)
    basis = augmented_basis_from_onb(v, tol=tol)
    coeffs = np.zeros(d * d)
    coeffs[:d] = np.clip(w, 0.0, None) / basis.c
    dec = ConeDecomposition(basis=basis.basis_view, coeffs=coeffs, residual=0.0)
    residual = hs_distance(dec.recombine(), e.op)
    dec = ConeDecomposition(basis=basis.basis_view, coeffs=coeffs, residual=residual)
    return basis, dec


def _family_view(family) -> OperatorBasis:
    """Coerce an operator family to its OperatorBasis coordinate view."""
    if isinstance(family, OperatorBasis):
        return family
    view = getattr(family, "basis_view", None)
    if isinstance(view, OperatorBasis):
        return view
    raise TypeError(
        f"expected an operator family with a coordinate view, got {type(family).__name__}"
    )


def cone_membership(
    h: HermitianOperator,
    basis,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ConeDecomposition | None:
    """Membership test for the cone of nonnegative combinations of a family.

    `basis` may be an OperatorBasis or anything carrying a `basis_view`
    (augmented bases, MIC-POMs).  Returns a decomposition when a
    nonnegative fit reaches residual below tol.residual, and None
    otherwise.  Absence is a value, not an error.

    The families accepted here are full operator bases, so the expansion
    is unique and the square solve settles membership outright: the point
    lies in the cone iff every coefficient clears -psd_slack.  A
    nonnegative least-squares pass remains as a fallback for targets the
    solve rejects.  The residual stored on the result is always
    recomputed from the returned coefficients; the solver's own reported
    norm is not trusted (scipy's nnls has been observed returning a zero
    residual for points demonstrably outside the cone).
    """
    view = _family_view(basis)
    if h.dim != view.dim:
        raise DimensionMismatchError(f"operator dim {h.dim} vs basis dim {view.dim}")
    mat = view.coordinate_matrix
    target = real_coordinates(h)
    exact = np.linalg.solve(mat, target)
    if exact.min() >= -tol.psd_slack:
        coeffs = np.clip(exact, 0.0, None)
        residual = float(np.linalg.norm(mat @ coeffs - target))
        if residual < tol.residual:
            return ConeDecomposition(basis=view, coeffs=coeffs, residual=residual)
    coeffs, _ = nnls(mat, target)
    residual = float(np.linalg.norm(mat @ coeffs - target))
    if residual >= tol.residual:
        return None
    return ConeDecomposition(basis=view, coeffs=coeffs, residual=residual)


def interior_point_Edelta(
    basis: AugmentedBasis,
    epsilon: float,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[Effect, float]:
    """The interior point I/d + delta * (sum of the tail elements).

    delta = epsilon / (2 ||T||) with T the sum of the elements beyond the
    first d, placing the point at distance exactly epsilon/2 from I/d.
    Raises `EpsilonTooLargeError` when the shifted operator stops being an
    effect; the caller is expected to halve epsilon and retry.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    d = basis.dim
    tail = np.zeros((d, d), dtype=np.complex128)
    for op in basis.ops[d:]:
        tail += op.mat
    t = HermitianOperator(tail)
    tnorm = t.norm()
    if tnorm <= 0.0:
        raise ValueError("tail elements vanish; the family cannot span")
    delta = epsilon / (2.0 * tnorm)
    shifted = HermitianOperator(np.eye(d) / d + delta * tail)
    check = is_effect(shifted, tol)
    if not check.ok:
        raise EpsilonTooLargeError(
            f"epsilon = {epsilon} moves the interior point outside the effects "
            f"(eigenvalue {check.witness:.12g})",
            witness=float(check.witness),
        )
    return Effect(shifted, tol), delta


@dataclass(frozen=True, eq=False)
class SpanCertificate:
    """d**2 effects in both cones, with membership proofs and a rank claim.

    memberships[k] holds the decomposition of witnesses[k] over the
    augmented family first and over the MIC-POM second.  `radius` is the
    ball radius actually used around the interior point.
    """

    augmented: AugmentedBasis
    mic: MicPom
    epsilon: float
    delta: float
    radius: float
    e_delta: Effect
    witnesses: tuple[Effect, ...]
    memberships: tuple[tuple[ConeDecomposition, ConeDecomposition], ...]
    rank: int
    tol: ToleranceConfig


def _witness_rank(witnesses, tol: ToleranceConfig) -> int:
    coords = np.column_stack([real_coordinates(e.op) for e in witnesses])
    svals = np.linalg.svd(coords, compute_uv=False)
    if svals[0] <= 0:
        return 0
    return int(np.count_nonzero(svals > tol.rank_cutoff * svals[0]))


def _admit_witness(
    candidate: HermitianOperator,
    aug_view: OperatorBasis,
    mic_view: OperatorBasis,
    tol: ToleranceConfig,
) -> tuple[Effect, ConeDecomposition, ConeDecomposition] | None:
    if not is_effect(candidate, tol).ok:
        return None
    mem_a = cone_membership(candidate, aug_view, tol)
    if mem_a is None:
        return None
    mem_m = cone_membership(candidate, mic_view, tol)
    if mem_m is None:
        return None
    return Effect(candidate, tol), mem_a, mem_m


def intersection_span_certificate(
    basis: AugmentedBasis,
    mic: MicPom,
    epsilon: float | None = None,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SpanCertificate:
    """Harvest d**2 linearly independent effects common to both cones.

    Strategy: place the interior point E_delta, bound a safe ball radius
    from the membership coefficients and the smallest singular values of
    the two coordinate systems, then shift E_delta by (radius/2) times
    each element of the closed-form orthonormal operator basis.  Every
    witness is re-verified by nonnegative least squares in both cones; on
    any failure the radius halves (at most 20 times) before falling back
    to seeded random directions inside the ball.  Raises
    `CertificateError` naming the failing stage instead of passing
    silently.
    """
    d = basis.dim
    if mic.dim != d:
        raise DimensionMismatchError(f"basis dim {d} vs MIC-POM dim {mic.dim}")
    eps = float(epsilon) if epsilon is not None else 1.0 / (4 * d)
    aug_view = basis.basis_view
    mic_view = mic.basis_view

    e_delta = None
    delta = 0.0
    mem_a = mem_m = None
    for _ in range(60):
        try:
            e_delta, delta = interior_point_Edelta(basis, eps, tol)
        except EpsilonTooLargeError:
            eps /= 2.0
            continue
        mem_a = cone_membership(e_delta.op, aug_view, tol)
        mem_m = cone_membership(e_delta.op, mic_view, tol)
        if (
            mem_a is not None
            and mem_m is not None
            and float(np.min(mem_a.coeffs)) > tol.psd_slack
            and float(np.min(mem_m.coeffs)) > tol.psd_slack
        ):
            break
        eps /= 2.0
    else:
        raise CertificateError(
            "stage interior-point: no epsilon yields an interior point of both cones"
        )

    # A perturbation within min_coeff * sigma_min of the coordinate system
    # keeps every membership coefficient nonnegative, for either cone.
    radius = min(
        float(np.min(mem_a.coeffs)) * float(aug_view.singular_values[-1]),
        float(np.min(mem_m.coeffs)) * float(mic_view.singular_values[-1]),
    )
    if radius <= 0.0:
        raise CertificateError("stage ball-radius: degenerate radius estimate")

    w_basis = orthonormal_operator_basis(d, tol)
    r = radius
    for _ in range(20):
        admitted = []
        for w_op in w_basis:
            found = _admit_witness(
                HermitianOperator(e_delta.mat + (r / 2.0) * w_op.mat),
                aug_view,
                mic_view,
                tol,
            )
            if found is None:
                break
            admitted.append(found)
        if len(admitted) == d * d:
            witnesses = tuple(item[0] for item in admitted)
            if _witness_rank(witnesses, tol) == d * d:
                return SpanCertificate(
                    augmented=basis,
                    mic=mic,
                    epsilon=eps,
                    delta=delta,
                    radius=r,
                    e_delta=e_delta,
                    witnesses=witnesses,
                    memberships=tuple((a, m) for _, a, m in admitted),
                    rank=d * d,
                    tol=tol,
                )
        r /= 2.0

    # Fallback: seeded random directions in the ball, collected greedily
    # while they keep increasing the numerical rank.
    rng = np.random.default_rng(seed)
    admitted = []
    r = radius
    for attempt in range(400):
        if attempt > 0 and attempt % 80 == 0:
            r /= 2.0
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        direction = HermitianOperator((x + x.conj().T) / 2.0)
        dnorm = direction.norm()
        if dnorm <= 0.0:
            continue
        candidate = HermitianOperator(e_delta.mat + (r / (2.0 * dnorm)) * direction.mat)
        found = _admit_witness(candidate, aug_view, mic_view, tol)
        if found is None:
            continue
        trial = admitted + [found]
        if _witness_rank([item[0] for item in trial], tol) == len(trial):
            admitted = trial
        if len(admitted) == d * d:
            return SpanCertificate(
                augmented=basis,
                mic=mic,
                epsilon=eps,
                delta=delta,
                radius=r,
                e_delta=e_delta,
                witnesses=tuple(item[0] for item in admitted),
                memberships=tuple((a, m) for _, a, m in admitted),
                rank=d * d,
                tol=tol,
            )
    raise CertificateError(
        f"stage random-ball: only {len(admitted)} of {d * d} independent witnesses found"
    )


@dataclass(frozen=True)
class CertificateReport:
    passed: bool
    failures: tuple[str, ...]
    rank: int
    max_membership_residual: float
    min_coefficient: float
    witness_count: int


def verify_certificate(
    cert: SpanCertificate, tol: ToleranceConfig | None = None
) -> CertificateReport:
    """Recheck a certificate from its data alone.

    Recomputes what the certificate claims: the augmented family satisfies
    its defining conditions, the MIC-POM is intact, every witness is an
    effect whose stored decompositions recombine to it with nonnegative
    coefficients, and the witness family has full rank.  Residuals are
    recomputed, never trusted.
    """
    tol = tol or cert.tol
    d = cert.augmented.dim
    failures: list[str] = []

    if not validate_augmented(cert.augmented, tol).passed:
        failures.append("augmented-basis")

    mic_total = cert.mic.pom.total()
    if hs_distance(mic_total, identity(d)) > tol.residual:
        failures.append("mic-pom-sum")

    max_res = 0.0
    min_coeff = float("inf")
    if len(cert.witnesses) != d * d or len(cert.memberships) != d * d:
        failures.append("witness-count")
    for k, (witness, (mem_a, mem_m)) in enumerate(
        zip(cert.witnesses, cert.memberships)
    ):
        if not is_effect(witness.op, tol).ok:
            failures.append(f"witness-{k}-effect")
            continue
        for label, mem in (("augmented", mem_a), ("mic", mem_m)):
            low = float(np.min(mem.coeffs))
            min_coeff = min(min_coeff, low)
            if low < -tol.psd_slack:
                failures.append(f"witness-{k}-{label}-negative-coefficient")
            res = hs_distance(mem.recombine(), witness.op)
            max_res = max(max_res, res)
            if res > tol.residual:
                failures.append(f"witness-{k}-{label}-residual")

    rank = _witness_rank(cert.witnesses, tol) if cert.witnesses else 0
    if rank != d * d:
        failures.append("witness-rank")

    return CertificateReport(
        passed=not failures,
        failures=tuple(failures),
        rank=rank,
        max_membership_residual=max_res,
        min_coefficient=min_coeff if min_coeff != float("inf") else 0.0,
        witness_count=len(cert.witnesses),
    )


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _tol_to_jsonable(tol: ToleranceConfig) -> dict:
    return {
        "eig_offdiag": tol.eig_offdiag,
        "psd_slack": tol.psd_slack,
        "residual": tol.residual,
        "rank_cutoff": tol.rank_cutoff,
    }


def _tol_from_jsonable(obj: dict) -> ToleranceConfig:
    return ToleranceConfig(
        eig_offdiag=float(obj["eig_offdiag"]),
        psd_slack=float(obj["psd_slack"]),
        residual=float(obj["residual"]),
        rank_cutoff=float(obj["rank_cutoff"]),
    )


def certificate_to_jsonable(cert: SpanCertificate) -> dict:
    onb = [
        [[float(z.real), float(z.imag)] for z in row] for row in cert.augmented.onb
    ]
    return {
        "dim": cert.augmented.dim,
        "epsilon": cert.epsilon,
        "delta": cert.delta,
        "radius": cert.radius,
        "rank": cert.rank,
        "tolerances": _tol_to_jsonable(cert.tol),
        "augmented": {
            "onb": onb,
            "c": cert.augmented.c,
            "gamma": cert.augmented.gamma,
            "elements": [operator_to_jsonable(op) for op in cert.augmented.ops],
        },
        "mic": pom_to_jsonable(cert.mic.pom),
        "e_delta": operator_to_jsonable(cert.e_delta.op),
        "witnesses": [operator_to_jsonable(e.op) for e in cert.witnesses],
        "memberships": [
            {
                "augmented": {"coeffs": [float(x) for x in a.coeffs], "residual": a.residual},
                "mic": {"coeffs": [float(x) for x in m.coeffs], "residual": m.residual},
            }
            for a, m in cert.memberships
        ],
    }


def certificate_from_jsonable(obj: dict) -> SpanCertificate:
    """Rebuild a certificate from its wire form.

    Structural problems (missing keys, malformed operators) raise
    ValueError; semantic invariant violations surface as
    `CertificateError` so callers can report a failed verification verdict
    rather than a parse error.
    """
    try:
        tol = _tol_from_jsonable(obj["tolerances"])
        aug_obj = obj["augmented"]
        onb = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in aug_obj["onb"]],
            dtype=np.complex128,
        )
        ops = tuple(operator_from_jsonable(item) for item in aug_obj["elements"])
        augmented = AugmentedBasis(
            onb=onb, ops=ops, c=float(aug_obj["c"]), gamma=float(aug_obj["gamma"])
        )
        mic_obj = obj["mic"]
        e_delta_obj = obj["e_delta"]
        witness_objs = list(obj["witnesses"])
        membership_objs = list(obj["memberships"])
        epsilon = float(obj["epsilon"])
        delta = float(obj["delta"])
        radius = float(obj["radius"])
        rank = int(obj["rank"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed certificate JSON: {exc}") from exc

    try:
        mic = MicPom(pom_from_jsonable(mic_obj, tol), tol)
        e_delta = Effect(operator_from_jsonable(e_delta_obj), tol)
        witnesses = tuple(
            Effect(operator_from_jsonable(item), tol) for item in witness_objs
        )
        aug_view = augmented.basis_view
        mic_view = mic.basis_view
        memberships = tuple(
            (
                ConeDecomposition(
                    basis=aug_view,
                    coeffs=np.array(item["augmented"]["coeffs"], dtype=np.float64),
                    residual=float(item["augmented"]["residual"]),
                ),
                ConeDecomposition(
                    basis=mic_view,
                    coeffs=np.array(item["mic"]["coeffs"], dtype=np.float64),
                    residual=float(item["mic"]["residual"]),
                ),
            )
            for item in membership_objs
        )
    except (NotAnEffectError, ValueError) as exc:
        raise CertificateError(f"certificate content fails its invariants: {exc}") from exc

    return SpanCertificate(
        augmented=augmented,
        mic=mic,
        epsilon=epsilon,
        delta=delta,
        radius=radius,
        e_delta=e_delta,
        witnesses=witnesses,
        memberships=memberships,
        rank=rank,
        tol=tol,
    )

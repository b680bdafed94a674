"""
Validation Utilities - Measure, Plan, Control and Field Validation Functions

Provides non-raising checks that collect every problem found, for use in
command-line reports and tests.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from lxml import etree

from .dynamics.control import ControlSchedule
from .dynamics.fields import FieldFamily
from .experiment.rng import SplitMix64
from .transport.measure import DiscreteMeasure
from .transport.plan import CouplingPlan


@dataclass
class ValidationResult:
    """Validation result"""

    is_valid: bool
    errors: List[str]
    warnings: List[str]

    def __bool__(self) -> bool:
        return self.is_valid


def validate_measure(atoms: np.ndarray, weights: np.ndarray) -> ValidationResult:
    """
    Validate raw measure data

    Args:
        atoms: (N, dim) atom coordinates
        weights: (N,) weights

    Returns:
        Validation result
    """
    errors: List[str] = []
    warnings: List[str] = []
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)

    if atoms.ndim != 2 or atoms.shape[0] == 0:
        errors.append("Atoms must be a non-empty (N, dim) array")
        return ValidationResult(False, errors, warnings)
    if weights.shape != (atoms.shape[0],):
        errors.append(f"Expected {atoms.shape[0]} weights, got shape {weights.shape}")
        return ValidationResult(False, errors, warnings)

    if not np.all(np.isfinite(atoms)):
        errors.append("Atoms contain non-finite coordinates")
    if np.any(weights <= 0):
        errors.append("Weights must be strictly positive")
    if abs(float(weights.sum()) - 1.0) > 1e-12:
        errors.append(f"Weights sum to {weights.sum():.17g}, expected 1")

    unique = np.unique(atoms, axis=0).shape[0]
    if unique < atoms.shape[0]:
        warnings.append(f"{atoms.shape[0] - unique} duplicate atoms")

    is_valid = len(errors) == 0
    return ValidationResult(is_valid, errors, warnings)


def validate_plan(plan: CouplingPlan, mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-9) -> ValidationResult:
    """
    Validate a coupling against its marginals

    Errors on marginal residual above ``tol`` or support above N1 + N2; warns when
    the support exceeds the N1 + N2 - 1 size of a basic solution.
    """
    errors: List[str] = []
    warnings: List[str] = []

    if plan.n1 != mu.size or plan.n2 != nu.size:
        errors.append(f"Plan shape ({plan.n1}, {plan.n2}) does not match measures ({mu.size}, {nu.size})")
        return ValidationResult(False, errors, warnings)

    residual = plan.marginal_residual(mu.weights, nu.weights)
    if residual > tol:
        errors.append(f"Marginal residual {residual:.3e} exceeds {tol:.1e}")
    if plan.support_size > plan.n1 + plan.n2:
        errors.append(f"Support {plan.support_size} exceeds the sparsity bound {plan.n1 + plan.n2}")
    elif plan.support_size > plan.n1 + plan.n2 - 1:
        warnings.append(f"Support {plan.support_size} is larger than a basic solution ({plan.n1 + plan.n2 - 1})")

    is_valid = len(errors) == 0
    return ValidationResult(is_valid, errors, warnings)


def validate_control(control: ControlSchedule, field: Optional[FieldFamily] = None) -> ValidationResult:
    """Validate control values and, optionally, their fit with a field family"""
    errors: List[str] = []
    warnings: List[str] = []

    if not np.all(np.isfinite(control.values)):
        errors.append("Control contains non-finite values")
    if field is not None and field.k != control.k:
        errors.append(f"Control has {control.k} channels, field family '{field.descriptor}' has {field.k}")
    if control.M < 2:
        warnings.append("Control has fewer than two time steps")

    is_valid = len(errors) == 0
    return ValidationResult(is_valid, errors, warnings)


def validate_field_constants(
    field: FieldFamily, samples: int = 200, radius: float = 10.0, seed: int = 0
) -> ValidationResult:
    """
    Sample-check the Lipschitz and growth constants of a field family

    Draws ``samples`` point pairs in the cube of half-width ``radius / sqrt(n)``
    (inside the ball of that radius) and checks |F_i(x)| <= C (1 + |x|) and
    |F_i(x) - F_i(y)| <= L |x - y| for every channel.
    """
    errors: List[str] = []
    warnings: List[str] = []
    rng = SplitMix64(seed)
    half_width = radius / np.sqrt(field.dim)
    x = (2.0 * rng.uniform(samples * field.dim).reshape(samples, field.dim) - 1.0) * half_width
    y = (2.0 * rng.uniform(samples * field.dim).reshape(samples, field.dim) - 1.0) * half_width

    fx, fy = field.evaluate(x), field.evaluate(y)
    values = np.linalg.norm(fx, axis=1)
    growth = field.growth_constant * (1.0 + np.linalg.norm(x, axis=1))[:, None]
    if np.any(values > growth * (1.0 + 1e-9)):
        errors.append(f"Growth constant C={field.growth_constant:.6g} violated at sampled points")

    gaps = np.linalg.norm(x - y, axis=1)
    quotients = np.linalg.norm(fx - fy, axis=1) / np.maximum(gaps, 1e-300)[:, None]
    if np.any(quotients > field.lipschitz_constant * (1.0 + 1e-6)):
        errors.append(f"Lipschitz constant L={field.lipschitz_constant:.6g} violated at sampled pairs")
    if field.lipschitz_constant > 0 and float(quotients.max()) < 1e-3 * field.lipschitz_constant:
        warnings.append("Sampled difference quotients are far below L; the constant may be loose")

    is_valid = len(errors) == 0
    return ValidationResult(is_valid, errors, warnings)


def validate_svg_structure(svg_content: str, expected_markers: Optional[int] = None) -> ValidationResult:
    """
    Validate a written scatter plot

    Args:
        svg_content: SVG document
        expected_markers: Required number of circle markers in the whole document
    """
    errors: List[str] = []
    warnings: List[str] = []

    try:
        root = etree.fromstring(svg_content.encode("utf-8"))
    except etree.XMLSyntaxError as e:
        errors.append(f"Invalid XML structure: {e}")
        return ValidationResult(False, errors, warnings)

    if etree.QName(root).localname != "svg":
        errors.append("Root element must be <svg>")
    markers = root.xpath("//*[local-name()='circle']")
    stray = [m for m in markers if etree.QName(m.getparent()).localname != "g"]
    if stray:
        warnings.append(f"{len(stray)} circle(s) outside layer groups")
    if expected_markers is not None and len(markers) != expected_markers:
        errors.append(f"Expected {expected_markers} markers, found {len(markers)}")

    is_valid = len(errors) == 0
    return ValidationResult(is_valid, errors, warnings)


def print_validation_result(result: ValidationResult, title: str = "Validation Result") -> None:
    """
    Print validation result

    Args:
        result: Validation result to print
        title: Title for the output
    """
    print(f"\n=== {title} ===")
    print(f"Valid: {result.is_valid}")

    if result.errors:
        print(f"\nErrors ({len(result.errors)}):")
        for error in result.errors:
            print(f"  ❌ {error}")

    if result.warnings:
        print(f"\nWarnings ({len(result.warnings)}):")
        for warning in result.warnings:
            print(f"  ⚠️  {warning}")

    if not result.errors and not result.warnings:
        print("  ✅ No issues found")

    print()

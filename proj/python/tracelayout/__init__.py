"""Anchor-based layouts and transition plans for Alloy instance traces."""

from ._core import (
    ApplicabilityError,
    BundleError,
    DomainError,
    Instance,
    IntegrityError,
    LayoutError,
    LayoutSpec,
    LookupError,
    OrderingError,
    ParseError,
    Scene,
    SpecError,
    TraceLayoutError,
    TransitionPlan,
    build_bundle,
    canonical_bundle,
    diff,
    layout,
    parse_instance_xml,
    parse_spec,
    plan,
    run,
    validate_spec,
)

__all__ = [
    "ApplicabilityError",
    "BundleError",
    "DomainError",
    "Instance",
    "IntegrityError",
    "LayoutError",
    "LayoutSpec",
    "LookupError",
    "OrderingError",
    "ParseError",
    "Scene",
    "SpecError",
    "TraceLayoutError",
    "TransitionPlan",
    "build_bundle",
    "canonical_bundle",
    "diff",
    "layout",
    "parse_instance_xml",
    "parse_spec",
    "plan",
    "run",
    "validate_spec",
]

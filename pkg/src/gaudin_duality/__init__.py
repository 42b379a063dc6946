"""Exact verification of the Gaudin model duality between gl_d and
gl_{p+m|q+n} with irregular singularities, on oscillator Fock spaces."""

from .duality import (DualityScenario, ScenarioError, builtin_scenario, builtin_scenarios, load_scenario,
                      verify_classical_duality, verify_generator_commutativity, verify_homomorphisms,
                      verify_image_equality_evidence, verify_quantum_duality)
from .psdo import PrecisionExhausted, PsdoRing, TruncatedPsdo, Window

__all__ = [
    "DualityScenario", "ScenarioError", "builtin_scenario", "builtin_scenarios", "load_scenario",
    "verify_classical_duality", "verify_generator_commutativity", "verify_homomorphisms",
    "verify_image_equality_evidence", "verify_quantum_duality",
    "PrecisionExhausted", "PsdoRing", "TruncatedPsdo", "Window",
]

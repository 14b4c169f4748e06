#!/usr/bin/env python3
"""
Leggett Toolkit - Demo Script
Walks through the explicit Werner model, the visibility threshold and the
Leggett vs Bell classification of the reference examples
"""

from src.config import CRITICAL_VISIBILITY, ENTANGLEMENT_VISIBILITY
from src.correlations import PresetLibrary, werner_correlation
from src.geometry import fibonacci_grid
from src.harness import RunConfig, classification_examples
from src.leggett import build_werner_model, p_minus_scan, threshold_scan
from src.main import configure_logging
from src.solvers import antipodal_grid, classify, product_grid


def demo_werner_model():
    """Quadrature check of the explicit model on the spread settings"""
    print("\n" + "=" * 70)
    print("🔭 EXPLICIT LEGGETT MODEL FOR WERNER STATES")
    print("=" * 70)

    grid = PresetLibrary().get("spread").grid
    scheme = fibonacci_grid(20_000)
    for V in (0.3, 0.6, 0.85):
        model = build_werner_model(V, scheme)
        deviation = model.correlation(grid).max_deviation(werner_correlation(V, grid))
        violations = model.component_violations(grid)
        print(f"\n   V = {V:.2f}")
        print(f"      Max deviation from -V a.b: {deviation:.2e}  (declared {scheme.accuracy:.0e})")
        print(f"      Components outside their positivity interval: {violations}")


def demo_threshold():
    """Where the construction stops working"""
    print("\n" + "=" * 70)
    print("📈 VISIBILITY THRESHOLD")
    print("=" * 70)

    scan = threshold_scan(10_000)
    print(f"\n   Numerical threshold: {scan.visibility:.9f}")
    print(f"   (1 + 1/sqrt(2)) / 2: {CRITICAL_VISIBILITY:.9f}")
    print(f"   Binding a.b:         {scan.binding_t:+.6f}")
    print(f"   Entangled and Leggett-modelled for {ENTANGLEMENT_VISIBILITY:.4f} < V <= {scan.visibility:.4f}")

    for V in (CRITICAL_VISIBILITY - 1e-4, CRITICAL_VISIBILITY + 1e-3):
        t, p_minus = p_minus_scan(V, 100_000)
        sign = "✅" if p_minus >= 0 else "❌"
        print(f"   {sign} V = {V:.6f}: min p- = {p_minus:+.3e} at a.b = {t:+.4f}")


def demo_classification():
    """Leggett vs Bell on the reference examples"""
    print("\n" + "=" * 70)
    print("⚖️  LEGGETT vs BELL CLASSIFICATION")
    print("=" * 70)

    library = PresetLibrary()
    for example in classification_examples(RunConfig(command="classify-examples")):
        preset = library.get(example.preset)
        corr = example.build(preset)
        extras = tuple(zip(preset.hidden_u, preset.hidden_v))
        grid = product_grid(8) if example.grid_n else antipodal_grid(100, extras)
        leggett, bell = classify(corr, grid)

        matches = (leggett.status, bell.status) == example.expected
        print(f"\n📋 {example.name}: {example.description}")
        print(f"   Leggett: {leggett.status.value}" + (f"  (margin {leggett.margin:.4f})" if leggett.margin else ""))
        print(f"   Bell:    {bell.status.value}" + (f"  (margin {bell.margin:.4f})" if bell.margin else ""))
        print(f"   {'✓ as expected' if matches else '⚠ unexpected'}")


def main():
    """Run all demos"""
    configure_logging("WARNING")
    print("\n" + "🧪" * 35)
    print("   LEGGETT TOOLKIT - DEMO")
    print("🧪" * 35)

    demo_werner_model()
    demo_threshold()
    demo_classification()

    print("\n" + "=" * 70)
    print("✅ DEMO COMPLETE")
    print("=" * 70)
    print("""
Next Steps:
1. python -m src.main verify-werner --V 0.85
2. python -m src.main threshold-scan --csv slack.csv
3. python -m src.main classify-examples --include-spread
4. python -m src.main feasibility --input my_correlation.json
    """)


if __name__ == "__main__":
    main()

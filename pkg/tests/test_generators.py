from fractions import Fraction

import pytest

from ivdeck import (
    ComplianceKind,
    GeneratorSpec,
    InvalidFractionsError,
    InvalidParamsError,
    classify_deterministic,
    classify_stochastic,
    defier_mix_spec,
    generate_population,
    validate_assumptions,
)
from ivdeck.population import SubpopulationType


def class_counts(pop):
    counts = {t: 0 for t in SubpopulationType}
    for ind in pop:
        counts[classify_deterministic(ind)] += 1
    return counts


class TestDeterministicMix:
    def test_exact_counts(self):
        spec = GeneratorSpec(
            kind="deterministic_mix",
            n=20,
            seed=1,
            complier=Fraction(1, 2),
            always_taker=Fraction(1, 4),
        )
        counts = class_counts(generate_population(spec))
        assert counts[SubpopulationType.COMPLIER] == 10
        assert counts[SubpopulationType.ALWAYS_TAKER] == 5
        assert counts[SubpopulationType.DEFIER] == 0
        # the unallocated remainder lands on never-takers
        assert counts[SubpopulationType.NEVER_TAKER] == 5

    def test_explicit_defiers(self):
        spec = GeneratorSpec(
            kind="deterministic_mix",
            n=8,
            complier=Fraction(1, 2),
            defier=Fraction(1, 4),
        )
        counts = class_counts(generate_population(spec))
        assert counts[SubpopulationType.DEFIER] == 2

    def test_non_integer_share_rejected(self):
        spec = GeneratorSpec(
            kind="deterministic_mix", n=4, complier=Fraction(1, 3)
        )
        with pytest.raises(InvalidFractionsError):
            generate_population(spec)

    def test_shares_above_one_rejected(self):
        with pytest.raises(InvalidFractionsError):
            GeneratorSpec(
                kind="deterministic_mix",
                n=4,
                complier=Fraction(3, 4),
                defier=Fraction(1, 2),
            )

    def test_negative_share_rejected(self):
        with pytest.raises(InvalidFractionsError):
            GeneratorSpec(
                kind="deterministic_mix", n=4, complier=Fraction(-1, 4)
            )

    def test_determinism(self):
        spec = GeneratorSpec(
            kind="deterministic_mix", n=12, seed=9, complier=Fraction(1, 2)
        )
        assert generate_population(spec) == generate_population(spec)
        other = GeneratorSpec(
            kind="deterministic_mix", n=12, seed=10, complier=Fraction(1, 2)
        )
        assert generate_population(spec) != generate_population(other)


class TestStochasticKinds:
    def test_random_values_lie_on_the_grid(self):
        spec = GeneratorSpec(kind="stochastic_random", n=30, seed=4, grid_denominator=8)
        pop = generate_population(spec)
        assert pop.kind == "stochastic"
        for ind in pop:
            for v in (ind.t, ind.t_star, ind.c, ind.c_star):
                assert isinstance(v, Fraction)
                assert 0 <= v <= 1
                assert (v * 8).denominator == 1

    def test_monotone_has_no_defiers(self):
        for seed in range(20):
            spec = GeneratorSpec(kind="stochastic_monotone", n=25, seed=seed)
            pop = generate_population(spec)
            for ind in pop:
                assert ind.t >= ind.t_star
            report = validate_assumptions(pop)
            assert report.counts["defier"] == 0

    def test_random_kind_eventually_produces_defiers(self):
        found = False
        for seed in range(20):
            spec = GeneratorSpec(kind="stochastic_random", n=25, seed=seed)
            kinds = {
                classify_stochastic(ind).kind
                for ind in generate_population(spec)
            }
            if ComplianceKind.DEFIER in kinds:
                found = True
                break
        assert found

    def test_determinism(self):
        spec = GeneratorSpec(kind="stochastic_random", n=10, seed=2)
        assert generate_population(spec) == generate_population(spec)


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(InvalidParamsError):
            GeneratorSpec(kind="gaussian", n=5)

    def test_n_must_be_positive(self):
        with pytest.raises(InvalidParamsError):
            GeneratorSpec(kind="deterministic_mix", n=0)

    def test_grid_denominator_must_be_positive(self):
        with pytest.raises(InvalidParamsError):
            GeneratorSpec(kind="stochastic_random", n=5, grid_denominator=0)

    def test_display_name(self):
        spec = GeneratorSpec(kind="deterministic_mix", n=5, seed=3)
        assert spec.display_name() == "deterministic_mix-n5-seed3"
        named = GeneratorSpec(kind="deterministic_mix", n=5, name="mypop")
        assert named.display_name() == "mypop"


class TestDefierMixSpec:
    def test_counts_for_quarter_defiers(self):
        spec = defier_mix_spec(20, Fraction(1, 4), seed=0)
        pop = generate_population(spec)
        counts = class_counts(pop)
        assert counts[SubpopulationType.DEFIER] == 5
        assert counts[SubpopulationType.COMPLIER] == 8
        assert counts[SubpopulationType.ALWAYS_TAKER] == 3
        assert counts[SubpopulationType.NEVER_TAKER] == 4

    def test_zero_defiers(self):
        pop = generate_population(defier_mix_spec(20, 0, seed=0))
        counts = class_counts(pop)
        assert counts[SubpopulationType.DEFIER] == 0
        assert counts[SubpopulationType.COMPLIER] >= 1

    def test_non_integer_defier_count_rejected(self):
        with pytest.raises(InvalidFractionsError):
            defier_mix_spec(20, Fraction(1, 3), seed=0)

    def test_all_classes_present_for_interior_fractions(self):
        pop = generate_population(defier_mix_spec(40, Fraction(1, 10), seed=2))
        counts = class_counts(pop)
        assert all(counts[t] > 0 for t in SubpopulationType)

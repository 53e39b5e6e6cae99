#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>

#include "gfix.hpp"
#include "support.hpp"

namespace gfix {
namespace {

TEST(GEval, DiscreteDiagonalIsZero) {
    const FiniteGSpace s = examples::discrete(3);
    EXPECT_EQ(g_eval(s, 1, 1, 1), 0.0);
    EXPECT_EQ(g_eval(s, 0, 0, 2), 1.0);
}

TEST(GEval, ThreePointTableValues) {
    const FiniteGSpace s = examples::three_point();
    EXPECT_EQ(g_eval(s, 0, 1, 1), 1.0);
    EXPECT_EQ(g_eval(s, 0, 1, 2), 2.0);
    EXPECT_EQ(g_eval(s, "1", "1", "0"), 1.0);
}

TEST(GEval, UnknownPointIsLookupError) {
    const FiniteGSpace s = examples::two_point();
    EXPECT_THROW(g_eval(s, 0, 1, 2), LookupError);
    EXPECT_THROW(g_eval(s, "0", "0", "zz"), LookupError);
}

TEST(GEval, PermutationInvariantOnRandomSpaces) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const FiniteGSpace s = testing::random_space(rng);
        const std::size_t n = s.size();
        for (PointIndex x = 0; x < n; ++x) {
            for (PointIndex y = 0; y < n; ++y) {
                for (PointIndex z = 0; z < n; ++z) {
                    std::array<PointIndex, 3> p{x, y, z};
                    const GValue v = g_eval(s, x, y, z);
                    std::sort(p.begin(), p.end());
                    do {
                        EXPECT_EQ(g_eval(s, p[0], p[1], p[2]), v);
                    } while (std::next_permutation(p.begin(), p.end()));
                }
            }
        }
    }
}

TEST(GEval, AnalyticFamilies) {
    const AnalyticGSpace maxval = examples::interval_maxval();
    const AnalyticGSpace maxdiff = examples::interval_maxdiff();
    EXPECT_EQ(g_eval(maxval, 0.25, 0.5, 0.125), 0.5);
    EXPECT_EQ(g_eval(maxval, 0.5, 0.5, 0.5), 0.5);
    EXPECT_EQ(g_eval(maxdiff, 0.25, 0.5, 0.125), 0.375);
    EXPECT_EQ(g_eval(maxdiff, 0.5, 0.5, 0.5), 0.0);
    EXPECT_THROW(g_eval(maxval, 0.5, 1.5, 0.5), LookupError);
}

TEST(DerivedMetric, Examples) {
    EXPECT_EQ(derived_metric(examples::two_point(), PointIndex{0}, PointIndex{1}), 3.0);
    EXPECT_EQ(derived_metric(examples::discrete(4), PointIndex{1}, PointIndex{3}), 2.0);
    EXPECT_EQ(derived_metric(examples::three_point(), PointIndex{2}, PointIndex{2}), 0.0);
}

TEST(DerivedMetric, SymmetricAndSeparatingOnValidSpaces) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const FiniteGSpace s = testing::random_space(rng);
        ASSERT_TRUE(validate_axioms(s).all_hold());
        for (PointIndex x = 0; x < s.size(); ++x) {
            for (PointIndex y = 0; y < s.size(); ++y) {
                EXPECT_EQ(derived_metric(s, x, y), derived_metric(s, y, x));
                EXPECT_EQ(derived_metric(s, x, y) == 0.0, x == y);
            }
        }
    }
}

TEST(FiniteGSpace, RejectsBadConstruction) {
    using E = FiniteGSpace::Entry;
    EXPECT_THROW(FiniteGSpace({}, 1.0, std::vector<E>{}), DomainError);
    EXPECT_THROW(FiniteGSpace({"a"}, 0.5, std::vector<E>{{0, 0, 0, 0.0}}), DomainError);
    EXPECT_THROW(FiniteGSpace({"a", "b"}, 1.0, std::vector<E>{{0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {0, 0, 1, 1.0}}),
                 DomainError);
    EXPECT_THROW(FiniteGSpace({"a"}, 1.0, std::vector<E>{{0, 0, 0, -1.0}}), DomainError);
    EXPECT_THROW(FiniteGSpace({"a", "a"}, 1.0, std::vector<E>{}), DomainError);
    // the same multiset listed twice with different values
    EXPECT_THROW(FiniteGSpace({"a", "b"}, 1.0,
                              std::vector<E>{{0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {0, 0, 1, 1.0}, {0, 1, 1, 2.0},
                                             {1, 0, 0, 3.0}}),
                 DomainError);
}

TEST(AnalyticGSpace, RejectsBadConstruction) {
    EXPECT_THROW(AnalyticGSpace(AnalyticFamily::IntervalMaxDiff, 1.0, 0.0, 10), DomainError);
    EXPECT_THROW(AnalyticGSpace(AnalyticFamily::IntervalMaxDiff, 0.0, 1.0, 1), DomainError);
    EXPECT_THROW(AnalyticGSpace(AnalyticFamily::IntervalMaxVal, -1.0, 1.0, 10), DomainError);
}

TEST(ValidateAxioms, BuiltinExamplesPass) {
    for (const char* name : {"two_point", "three_point", "discrete(2)", "discrete(5)"}) {
        const FiniteGSpace s = std::get<FiniteGSpace>(make_example(name));
        EXPECT_TRUE(validate_axioms(s).all_hold()) << name;
    }
    const FiniteGSpace three = examples::three_point();
    EXPECT_TRUE(validate_axioms(three, 3).all_hold());
}

TEST(ValidateAxioms, ZeroSeparationFailsG2) {
    const std::vector<FiniteGSpace::Entry> e{{0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {0, 0, 1, 0.0}, {0, 1, 1, 1.0}};
    const FiniteGSpace s({"0", "1"}, 1.0, e);
    const AxiomReport r = validate_axioms(s);
    ASSERT_FALSE(r[Axiom::G2].holds);
    EXPECT_EQ(r[Axiom::G2].witness, (std::vector<PointIndex>{0, 0, 1}));
    EXPECT_EQ(g_eval(s, 0, 0, 1), 0.0);
}

TEST(ValidateAxioms, LoweredPerimeterFailsG3) {
    const std::vector<FiniteGSpace::Entry> e{{0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {2, 2, 2, 0.0}, {0, 0, 1, 1.0},
                                             {0, 1, 1, 1.0}, {0, 0, 2, 2.0}, {1, 1, 2, 2.0}, {0, 2, 2, 2.0},
                                             {1, 2, 2, 2.0}, {0, 1, 2, 0.5}};
    const FiniteGSpace s({"0", "1", "2"}, 1.0, e);
    const AxiomReport r = validate_axioms(s, 2);
    const AxiomVerdict& v = r[Axiom::G3];
    ASSERT_FALSE(v.holds);
    ASSERT_EQ(v.witness.size(), 3u);
    EXPECT_EQ(g_eval(s, v.witness[0], v.witness[0], v.witness[1]), v.lhs);
    EXPECT_EQ(g_eval(s, v.witness[0], v.witness[1], v.witness[2]), v.rhs);
    EXPECT_GT(v.lhs, v.rhs);
    EXPECT_EQ(v.rhs, 0.5);
}

TEST(ValidateAxioms, CutoffOutOfRange) {
    EXPECT_THROW(validate_axioms(examples::three_point(), 0), DomainError);
    EXPECT_THROW(validate_axioms(examples::three_point(), 4), DomainError);
}

TEST(ValidateAxioms, RandomSpacesAreValidAndKIsTight) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const FiniteGSpace s = testing::random_space(rng, 5, trial % 3 == 0);
        const AxiomReport r = validate_axioms(s);
        EXPECT_TRUE(r.all_hold()) << "trial " << trial;
        if (s.k() > 1.0 + 1e-9) {
            const std::vector<FiniteGSpace::Entry> e = s.entries();
            const FiniteGSpace loose(s.labels(), std::max(1.0, s.k() * (1.0 - 1e-6)), e);
            EXPECT_FALSE(validate_axioms(loose)[Axiom::G5].holds);
        }
    }
}

TEST(ValidateAxioms, G5PrimePassImpliesNoLengthOneG5Witness) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        FiniteGSpace s = testing::random_space(rng, 5);
        std::vector<FiniteGSpace::Entry> e = s.entries();
        // perturb the table, then keep only tables where G5' holds
        std::uniform_int_distribution<std::size_t> pick(0, e.size() - 1);
        e[pick(rng)].value *= 2.0;
        FiniteGSpace t(s.labels(), s.k(), e);
        const AxiomReport r = validate_axioms(t);
        if (r[Axiom::G5Prime].holds && !r[Axiom::G5].holds) {
            EXPECT_GE(r[Axiom::G5].witness.size(), 5u);
        }
        if (r[Axiom::G5Prime].holds && t.size() > 1) {
            EXPECT_TRUE(validate_axioms(t, 1)[Axiom::G5].holds);
        }
    }
}

TEST(ValidateAxioms, WitnessesReproduce) {
    std::mt19937_64 rng(15);
    int failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const FiniteGSpace base = testing::random_space(rng, 4);
        std::vector<FiniteGSpace::Entry> e = base.entries();
        std::uniform_int_distribution<std::size_t> pick(0, e.size() - 1);
        std::uniform_real_distribution<double> val(0.0, 4.0);
        e[pick(rng)].value = val(rng);
        const FiniteGSpace s(base.labels(), base.k(), e);
        const AxiomReport r = validate_axioms(s);
        for (Axiom a : kAllAxioms) {
            const AxiomVerdict& v = r[a];
            if (v.holds) continue;
            ++failures;
            const auto& w = v.witness;
            switch (a) {
                case Axiom::G1: EXPECT_NE(g_eval(s, w[0], w[0], w[0]), 0.0); break;
                case Axiom::G2:
                    EXPECT_NE(w[0], w[2]);
                    EXPECT_LE(g_eval(s, w[0], w[0], w[2]), kAxiomTolerance);
                    break;
                case Axiom::G3:
                    EXPECT_NE(w[2], w[1]);
                    EXPECT_GT(g_eval(s, w[0], w[0], w[1]), g_eval(s, w[0], w[1], w[2]));
                    break;
                case Axiom::G4: ADD_FAILURE() << "G4 is structural"; break;
                case Axiom::G5Prime:
                    EXPECT_GT(g_eval(s, w[0], w[1], w[2]),
                              s.k() * (g_eval(s, w[0], w[3], w[3]) + g_eval(s, w[3], w[1], w[2])));
                    break;
                case Axiom::G5: {
                    GValue sum = g_eval(s, w[0], w[3], w[3]);
                    for (std::size_t i = 3; i + 1 < w.size(); ++i) sum += g_eval(s, w[i], w[i + 1], w[i + 1]);
                    sum += g_eval(s, w.back(), w[1], w[2]);
                    EXPECT_GT(g_eval(s, w[0], w[1], w[2]), s.k() * sum);
                    break;
                }
            }
        }
    }
    EXPECT_GT(failures, 0);
}

TEST(ValidateAxioms, IntervalMaxvalFailsG1OnTheGrid) {
    const SampledAxiomReport r = validate_axioms(examples::interval_maxval(), 2);
    EXPECT_FALSE(r.report[Axiom::G1].holds);
    EXPECT_TRUE(r.report[Axiom::G3].holds);
    const SampledAxiomReport d = validate_axioms(examples::interval_maxdiff(), 2);
    EXPECT_TRUE(d.report.all_hold());
}

TEST(Diameter, Examples) {
    EXPECT_EQ(diameter(examples::discrete(1)), 0.0);
    EXPECT_EQ(diameter(examples::two_point()), 2.0);
    EXPECT_EQ(diameter(examples::three_point()), 2.0);
    EXPECT_EQ(diameter(examples::interval_maxval()), 1.0);
}

TEST(MakeExample, KnownAndUnknownNames) {
    const FiniteGSpace d2 = std::get<FiniteGSpace>(make_example("discrete(2)"));
    EXPECT_EQ(d2.size(), 2u);
    EXPECT_EQ(g_eval(d2, 0, 1, 1), 1.0);
    EXPECT_EQ(g_eval(d2, 0, 0, 1), 1.0);
    const FiniteGSpace two = std::get<FiniteGSpace>(make_example("two_point"));
    EXPECT_EQ(g_eval(two, 0, 0, 1), 1.0);
    EXPECT_EQ(g_eval(two, 0, 1, 1), 2.0);
    const AnalyticGSpace iv = std::get<AnalyticGSpace>(make_example("interval_maxval"));
    EXPECT_EQ(iv.lo(), 0.0);
    EXPECT_EQ(iv.hi(), 1.0);
    EXPECT_EQ(iv.grid_n(), examples::kDefaultGrid);
    EXPECT_THROW(make_example("four_point"), DomainError);
    EXPECT_THROW(make_example("discrete(0)"), DomainError);
    EXPECT_THROW(make_example("discrete(x)"), DomainError);
}

}  // namespace
}  // namespace gfix

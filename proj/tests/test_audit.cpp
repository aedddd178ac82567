#include <cmath>

#include <gtest/gtest.h>

#include "slidefield/audit.hpp"

using namespace slidefield;
using namespace slidefield::audit;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SamplerConfig config(int dim, int trials = 400, std::uint64_t seed = 1) {
  SamplerConfig cfg;
  cfg.dim = dim;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

struct MatrixCell {
  const char* law;
  const char* check;
  bool passes;
};

class FalsificationMatrix : public ::testing::TestWithParam<MatrixCell> {};

}  // namespace

TEST_P(FalsificationMatrix, Cell) {
  const MatrixCell cell = GetParam();
  for (int dim : {2, 3, 5}) {
    const AuditReport r = run_check(cell.check, law_from_name(cell.law), config(dim));
    EXPECT_EQ(r.passed(), cell.passes) << cell.law << ' ' << cell.check << " dim " << dim << " worst "
                                       << r.worst_violation;
    EXPECT_EQ(r.failures == 0, r.worst_violation <= r.tolerance);
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllLaws, FalsificationMatrix,
    ::testing::Values(MatrixCell{"filippov", "matrix-equivariance", true},
                      MatrixCell{"filippov", "homogeneity-linearity", true},
                      MatrixCell{"filippov", "linear-dependence", true},
                      MatrixCell{"filippov", "continuous-limit", true},
                      MatrixCell{"filippov", "parametrization-consistency", true},
                      MatrixCell{"filippov", "sliding-region-invariance", true},
                      MatrixCell{"filippov", "pointwise", true},
                      MatrixCell{"mean", "matrix-equivariance", false},
                      MatrixCell{"mean", "homogeneity-linearity", true},
                      MatrixCell{"mean", "linear-dependence", false},
                      MatrixCell{"mean", "continuous-limit", true},
                      MatrixCell{"mean", "parametrization-consistency", false},
                      MatrixCell{"mean", "pointwise", true},
                      MatrixCell{"scaled_filippov(2)", "matrix-equivariance", true},
                      MatrixCell{"scaled_filippov(2)", "homogeneity-linearity", true},
                      MatrixCell{"scaled_filippov(2)", "linear-dependence", true},
                      MatrixCell{"scaled_filippov(2)", "continuous-limit", false},
                      MatrixCell{"scaled_filippov(2)", "parametrization-consistency", true},
                      MatrixCell{"scaled_filippov(2)", "pointwise", true}),
    [](const auto& info) {
      std::string name = std::string(info.param.law) + "_" + info.param.check;
      for (char& c : name)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
      return name;
    });

TEST(MatrixEquivariance, MeanLawHandWitness) {
  Mat a(2, 2);
  a << 1, 1, 0, 1;
  const Sample s = matrix_equivariance_sample(mean_law(), a, vec({0, 1}), vec({0, 0}));
  EXPECT_EQ(s.lhs, vec({0, 0}));
  EXPECT_DOUBLE_EQ(s.rhs(0), 0.5);
  EXPECT_DOUBLE_EQ(s.violation, 0.5);
}

TEST(MatrixEquivariance, IdentityMatrixIsExact) {
  for (const auto& name : {"filippov", "mean", "scaled_filippov(2)"}) {
    const Sample s = matrix_equivariance_sample(law_from_name(name), Mat::Identity(3, 3), vec({1, 2, 3}),
                                                vec({-4, 5, -1}));
    EXPECT_EQ(s.violation, 0.0);
  }
}

TEST(MatrixEquivariance, LeavingTheDomainIsReported) {
  Mat a = Mat::Identity(2, 2);
  a(0, 1) = 1.0;
  EXPECT_NO_THROW(matrix_equivariance_sample(filippov_law(), a, vec({1, 1}), vec({1, -1})));
  Mat flip = Mat::Identity(2, 2);
  flip(1, 1) = -1.0;
  EXPECT_NO_THROW(matrix_equivariance_sample(filippov_law(), flip, vec({1, 1}), vec({1, -1})));
}

TEST(Homogeneity, SyntheticLawFailsZeroHomogeneity) {
  const CharacteristicMap law("p_abs_q", [](const Vec& p, double q, const Vec&, double) {
    return (p * std::abs(q)).eval();
  });
  const DomainPoint d{vec({2.0}), 0.5, vec({1.0}), -1.0};
  const Sample s = homogeneity_sample(law, d, 3.0, vec({0.0}), vec({0.0}));
  // |q|(k - 1)|p| with q = 0.5, k = 3, p = 2; relative to max(1, |lhs|, |rhs|) = 3.
  EXPECT_DOUBLE_EQ(s.lhs(0) - s.rhs(0), 0.5 * 2.0 * 2.0);
  EXPECT_DOUBLE_EQ(s.violation, 2.0 / 3.0);
  EXPECT_FALSE(check_homogeneity_and_linearity(law, config(3)).passed());
}

TEST(LinearDependence, MeanWitnessValue) {
  const Sample s = linear_dependence_sample(mean_law(), vec({0.5}), 1.0, 2.0, -1.0);
  EXPECT_EQ(s.inputs[4].second, vec({1, 2}));
  EXPECT_EQ(s.inputs[5].second, vec({-0.5, -1}));
  EXPECT_DOUBLE_EQ(s.lhs(0), 0.25);
}

TEST(LinearDependence, FilippovAntiParallelIsExactlyZero) {
  const Sample s = linear_dependence_sample(filippov_law(), vec({1.7, -0.3}), 2.5, 1.0, -1.0);
  EXPECT_EQ(s.violation, 0.0);
}

TEST(ContinuousLimit, DeviationOfEachLaw) {
  const Vec p = vec({3, 7});
  const Sample fil = continuous_limit_sample(filippov_law(), p, 0.8);
  EXPECT_EQ(fil.violation, 0.0);
  const Sample mean = continuous_limit_sample(mean_law(), p, 0.8);
  EXPECT_EQ(mean.violation, 0.0);
  const Sample scaled = continuous_limit_sample(scaled_filippov_law(2.0), p, 0.8);
  EXPECT_DOUBLE_EQ((scaled.lhs - scaled.rhs).norm(), p.norm());
  EXPECT_DOUBLE_EQ(scaled.inputs.back().second(0), p.norm());
}

TEST(Parametrization, IdentityMapIsExact) {
  Rng rng(3);
  const SamplerConfig cfg = config(3);
  for (int k = 0; k < 50; ++k) {
    const SurfaceCase c = sample_sliding_case(rng, cfg);
    const Sample s = parametrization_sample({mean_law()}, c.field, identity_diffeo(3), c.point);
    EXPECT_LE(s.violation, 1e-15);
  }
}

TEST(Parametrization, FilippovOnSuppliedFlatField) {
  const PiecewiseField pf{flat_surface(3), [](const Vec& x) { return vec({1, x(0), 1.0 + 0.2 * std::sin(x(1))}); },
                          [](const Vec& x) { return vec({x(1), -2, -1.0 - 0.1 * x(0) * x(0)}); }};
  EXPECT_TRUE(check_parametrization_consistency(filippov_law(), pf, config(3)).passed());
  EXPECT_FALSE(check_parametrization_consistency(mean_law(), pf, config(3)).passed());
}

TEST(RegionInvariance, FlatToTiltKeepsAttractingPoint) {
  const PiecewiseField pf{flat_surface(2), constant_field(vec({1, 1.5})), constant_field(vec({1, -0.5}))};
  const SurfaceChart tilt = tilt_surface(2, 1.0);
  const Diffeo phi = conjugate_through_charts(pf.surface, tilt, identity_diffeo(2));
  const PiecewiseField image = pushforward(phi, pf, tilt);
  const Vec x = vec({0.4, 0.0});
  EXPECT_EQ(region_invariance_sample(pf, image, phi, x).violation, 0.0);
  EXPECT_EQ(classify(image, phi.forward(x)), RegionKind::AttractingSliding);
}

TEST(RegionInvariance, TranslationKeepsClassification) {
  const PiecewiseField pf{paraboloid_surface(2, 1.0), [](const Vec& x) { return vec({x(0), 2.0}); },
                          constant_field(vec({0.5, -1.0}))};
  const Diffeo phi = conjugate_through_charts(pf.surface, pf.surface, plane_translation(vec({0.3})));
  const PiecewiseField image = pushforward(phi, pf, pf.surface);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vec x = pf.surface.lift(rng.vector(1, -2, 2));
    EXPECT_EQ(classify(pf, x), classify(image, image.surface.project(phi.forward(x))));
  }
}

TEST(RegionInvariance, CrossingStaysCrossingUnderShear) {
  const PiecewiseField pf{flat_surface(3), constant_field(vec({1, 0, 2})), constant_field(vec({0, 1, 0.5}))};
  const Diffeo phi = conjugate_through_charts(pf.surface, pf.surface, plane_tangential_shear(3, 0.7));
  const PiecewiseField image = pushforward(phi, pf, pf.surface);
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    const Vec x = join(rng.vector(2, -3, 3), 0.0);
    EXPECT_EQ(classify(image, image.surface.project(phi.forward(x))), RegionKind::Crossing);
  }
}

TEST(RegionInvariance, RandomCatalogNoFailures) {
  for (int dim : {1, 2, 4}) EXPECT_EQ(check_sliding_region_invariance(std::nullopt, config(dim, 1000)).failures, 0);
}

TEST(Pointwise, PerturbedFieldsAgreeOnlyAtThePoint) {
  Rng rng(12);
  const SamplerConfig cfg = config(3);
  for (int k = 0; k < 50; ++k) {
    const SurfaceCase c = sample_sliding_case(rng, cfg);
    const PiecewiseField other = perturb_away_from(c.field, c.point, rng, cfg);
    EXPECT_EQ(other.lower(c.point), c.field.lower(c.point));
    Vec away = c.point;
    away(0) += 0.5;
    EXPECT_GT((other.lower(away) - c.field.lower(away)).norm(), 1e-3);
  }
}

TEST(Sampler, DomainPointsStayInDomain) {
  const SamplerConfig cfg = config(4, 1);
  Rng rng(1);
  int zeros = 0;
  for (int k = 0; k < 10000; ++k) {
    const DomainPoint d = sample_domain_point(rng, cfg);
    EXPECT_TRUE(in_law_domain(d.q, d.s));
    zeros += (d.q == 0.0 || d.s == 0.0);
  }
  EXPECT_GT(zeros, 0);
}

TEST(Sampler, ConfigValidation) {
  SamplerConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.lo = 5;
  cfg.hi = 5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(run_check("everything", filippov_law(), SamplerConfig{}), ConfigError);
}

TEST(Report, DeterministicForFixedSeed) {
  for (const auto& check : check_names()) {
    const auto a = to_json(run_check(check, mean_law(), config(3, 200, 42))).dump();
    const auto b = to_json(run_check(check, mean_law(), config(3, 200, 42))).dump();
    EXPECT_EQ(a, b) << check;
  }
  const auto c = to_json(run_check("matrix-equivariance", mean_law(), config(3, 200, 43))).dump();
  EXPECT_NE(to_json(run_check("matrix-equivariance", mean_law(), config(3, 200, 42))).dump(), c);
}

TEST(Report, WitnessesAreCappedAndOrdered) {
  const AuditReport r = check_linear_dependence_vanishing(mean_law(), config(3, 300));
  EXPECT_GT(r.failures, static_cast<int>(kMaxWitnesses));
  ASSERT_EQ(r.witnesses.size(), kMaxWitnesses);
  for (std::size_t i = 1; i < r.witnesses.size(); ++i) EXPECT_LT(r.witnesses[i - 1].trial, r.witnesses[i].trial);
}

TEST(Report, JsonShape) {
  const auto j = to_json(check_linear_dependence_vanishing(mean_law(), config(2, 20)));
  for (const char* key : {"law", "check", "trials", "failures", "worst_violation", "tolerance", "witnesses"})
    EXPECT_TRUE(j.contains(key)) << key;
  const auto& w = j["witnesses"].front();
  for (const char* key : {"trial", "inputs", "lhs", "rhs", "violation"}) EXPECT_TRUE(w.contains(key)) << key;
  EXPECT_TRUE(w["inputs"].contains("u1"));
}

TEST(Report, NonFiniteViolationCountsAsFailure) {
  const CharacteristicMap nan_law("nan", [](const Vec& p, double, const Vec&, double) {
    return Vec::Constant(p.size(), NAN).eval();
  });
  const AuditReport r = check_continuous_limit(nan_law, config(2, 5));
  EXPECT_EQ(r.failures, 5);
  EXPECT_TRUE(to_json(r)["witnesses"][0]["lhs"][0].is_null());
}

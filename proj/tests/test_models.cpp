#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rpsmooth/error.hpp"
#include "rpsmooth/models.hpp"

#include <cmath>

using namespace rpsmooth;
using doctest::Approx;

namespace {

template <class Fn>
ErrorKind kind_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an rpsmooth::Error");
  return ErrorKind::InvalidParam;
}

}  // namespace

TEST_CASE("OU process matrices") {
  const ProcessModel m = build_ou(5.9e4, 1.9e4);
  CHECK(m.n == 1);
  CHECK(m.A(0, 0) == -5.9e4);
  CHECK(m.B(0, 0) == Approx(std::sqrt(1.9e4)).epsilon(1e-15));
}

TEST_CASE("resonant process matrices") {
  const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
  CHECK(m.n == 2);
  CHECK(m.A(0, 0) == 0.0);
  CHECK(m.A(0, 1) == 1.0);
  CHECK(m.A(1, 0) == Approx(-3.948e7).epsilon(1e-3));
  CHECK(m.A(1, 1) == Approx(-1.2566e3).epsilon(1e-12));
  CHECK(m.B(0, 0) == 0.0);
  CHECK(m.B(1, 0) == 9e4);

  const ProcessModel crit = build_resonant(1.0, 1.0, 1.0);
  CHECK(crit.A(1, 0) == -1.0);
  CHECK(crit.A(1, 1) == -2.0);
}

TEST_CASE("non-positive model parameters are rejected") {
  CHECK(kind_of([] { build_ou(0.0, 1.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { build_ou(1.0, -1.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { build_resonant(1.0, 0.0, 1.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { build_resonant(1.0, 1.0, std::nan("")); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { make_uncertainty(build_ou(1.0, 1.0), 1.0); }) == ErrorKind::InvalidParam);
}

TEST_CASE("uncertainty perturbation") {
  const ProcessModel ou = build_ou(5.9e4, 1.9e4);
  const UncertaintySpec u = make_uncertainty(ou, 0.8);
  CHECK(apply_uncertainty(ou, u, 1.0)(0, 0) == Approx(-0.2 * 5.9e4).epsilon(1e-14));
  CHECK(apply_uncertainty(ou, u, 0.0) == ou.A);

  const ProcessModel res = build_resonant(9e4, 0.1, 6.283e3);
  const UncertaintySpec ur = make_uncertainty(res, 0.8);
  const Mat a = apply_uncertainty(res, ur, -1.0);
  // Entrywise against the product B1 * delta * K.
  const Mat expected = res.A + res.B * (-1.0) * ur.K;
  CHECK((a - expected).norm() == 0.0);
  CHECK(a(1, 0) == Approx(-0.2 * 6.283e3 * 6.283e3).epsilon(1e-12));
  CHECK(a(1, 1) == res.A(1, 1));
  CHECK(apply_uncertainty(res, ur, 0.0) == res.A);

  CHECK(kind_of([&] { apply_uncertainty(ou, u, 1.0 + 1e-12); }) == ErrorKind::DeltaOutOfRange);
  CHECK(kind_of([&] { apply_uncertainty(ou, u, std::nan("")); }) == ErrorKind::DeltaOutOfRange);
}

TEST_CASE("effective squeezing under loss") {
  const EffectiveSqueezing lossless = effective_squeezing(0.9, 0.0);
  CHECK(lossless.r_m == Approx(0.9).epsilon(1e-15));
  CHECK(lossless.r_p == Approx(0.9).epsilon(1e-15));

  const EffectiveSqueezing vac = effective_squeezing(0.0, 0.33);
  CHECK(vac.r_m == Approx(0.0).epsilon(1e-15));
  CHECK(vac.r_p == Approx(0.0).epsilon(1e-15));

  const EffectiveSqueezing ou_pair = effective_squeezing(0.737, 0.33);
  CHECK(std::abs(ou_pair.r_m - 0.36) < 0.02);
  CHECK(std::abs(ou_pair.r_p - 0.59) < 0.02);
  // exp(-2 r_m) never drops below the loss.
  for (double r : {0.5, 2.0, 5.0}) CHECK(std::exp(-2.0 * effective_squeezing(r, 0.33).r_m) >= 0.33);

  // Loss never increases squeezing or anti-squeezing.
  for (double l : {0.1, 0.5, 0.9}) {
    const EffectiveSqueezing e = effective_squeezing(1.2, l);
    CHECK(e.r_m < 1.2);
    CHECK(e.r_p < 1.2);
    CHECK(e.r_m <= e.r_p);
  }
  CHECK(kind_of([] { effective_squeezing(-0.1, 0.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { effective_squeezing(0.1, 1.0); }) == ErrorKind::InvalidParam);
}

TEST_CASE("squeezing configuration constructors") {
  const SqueezingConfig p = SqueezingConfig::from_pure(1e6, 0.737, 0.33);
  CHECK(p.r_pure == 0.737);
  CHECK(p.l_sq == 0.33);
  CHECK(p.r_m == effective_squeezing(0.737, 0.33).r_m);

  const SqueezingConfig q = SqueezingConfig::from_pair(1e6, 0.36, 0.59);
  CHECK(std::isnan(q.r_pure));
  CHECK(q.r_m == 0.36);
  CHECK(q.r_p == 0.59);
  CHECK(kind_of([] { SqueezingConfig::from_pair(1e6, 0.6, 0.5); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { SqueezingConfig::from_pure(0.0, 0.5, 0.0); }) == ErrorKind::InvalidParam);
}

TEST_CASE("effective measurement noise power") {
  CHECK(compute_R_sq(0.0, 0.36, 0.59) == Approx(std::exp(-0.72)).epsilon(1e-15));
  CHECK(compute_R_sq(1.0, 0.36, 0.59) == Approx(std::exp(1.18)).epsilon(1e-15));
  for (double s : {0.0, 0.3, 1.0}) CHECK(compute_R_sq(s, 0.0, 0.0) == 1.0);
  CHECK(kind_of([] { compute_R_sq(-1e-9, 0.1, 0.2); }) == ErrorKind::SigmaOutOfRange);
  CHECK(kind_of([] { compute_R_sq(1.0 + 1e-9, 0.1, 0.2); }) == ErrorKind::SigmaOutOfRange);
}

TEST_CASE("measurement row") {
  CHECK(measurement_row(1e6, 1.0, 1)(0, 0) == 2000.0);
  const Mat c = measurement_row(25e4, 1.0, 2);
  CHECK(c.cols() == 2);
  CHECK(c(0, 0) == 1000.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(measurement_row(1e6, 4.0, 1)(0, 0) == 1000.0);
}

TEST_CASE("squeezing level in dB") {
  CHECK(squeezing_db(0.0) == 0.0);
  CHECK(squeezing_db(-0.5 * std::log(0.1)) == Approx(-10.0).epsilon(1e-14));
  CHECK(squeezing_db(1.485) == Approx(-12.9).epsilon(2e-3));
  CHECK(squeezing_db(r_from_db(-4.1)) == Approx(-4.1).epsilon(1e-14));
  CHECK(r_from_db(0.0) == 0.0);
}

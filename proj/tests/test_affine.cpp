#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tse/affine.hpp"
#include "tse/models.hpp"

using namespace tse;

namespace {

ParamSet params(std::initializer_list<std::pair<const std::string, double>> kv) {
    ParamSet p;
    p.scalars = kv;
    return p;
}

const ParamSet kCirLow = params({{"a", 0.01}, {"b", 0.5}, {"sigma", 0.3}});
const ParamSet kCirHigh = params({{"a", 0.04}, {"b", 0.5}, {"sigma", 0.2}});
const ParamSet kVasicek = params({{"a", 0.05}, {"b", 0.3}, {"sigma", 0.02}});

}  // namespace

TEST_CASE("cir closed form reproduces independently computed prices") {
    AffineCoefficients low = cir_affine(kCirLow);
    CHECK(low.A(1.0) == doctest::Approx(0.99577291474741).epsilon(1e-12));
    CHECK(low.B(1.0) == doctest::Approx(0.77785954783231944).epsilon(1e-13));

    const double expected[3][3] = {
        // tau = 0.5, 1, 2 at x = 0.02, 0.05, 0.1
        {0.99008062207499916, 0.98040136446001773, 0.96190342995435484},
        {0.97706989530882032, 0.95778780637140458, 0.92733509899939705},
        {0.95576418434253867, 0.92125169147269501, 0.8724597599657091},
    };
    const double xs[] = {0.02, 0.05, 0.1};
    const double taus[] = {0.5, 1.0, 2.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(low.price(xs[i], taus[j]) ==
                  doctest::Approx(expected[i][j]).epsilon(1e-13));

    AffineCoefficients high = cir_affine(kCirHigh);
    CHECK(high.A(1.0) == doctest::Approx(0.98314378712236379).epsilon(1e-13));
    CHECK(high.B(1.0) == doctest::Approx(0.78287083089400492).epsilon(1e-13));
    CHECK(high.price(0.05, 1.0) == doctest::Approx(0.94540352003605111).epsilon(1e-13));
}

TEST_CASE("vasicek closed form matches and derivative is -B times price") {
    AffineCoefficients v = vasicek_affine(kVasicek);
    CHECK(v.B(2.0) == doctest::Approx(1.5039612130199119).epsilon(1e-13));
    CHECK(v.price(0.03, 2.0) == doctest::Approx(0.88034304326217956).epsilon(1e-13));
    CHECK(v.price(0.05, 1.0) == doctest::Approx(0.93629920294937811).epsilon(1e-13));
    CHECK(v.price(0.02, 0.5) == doctest::Approx(0.98488780031864731).epsilon(1e-13));
    CHECK(v.dprice_dx(0.03, 2.0) ==
          doctest::Approx(-1.3240017912182283).epsilon(1e-13));
    CHECK(v.dprice_dx(0.03, 2.0) ==
          doctest::Approx(-v.B(2.0) * v.price(0.03, 2.0)).epsilon(1e-15));

    AffineCoefficients c = cir_affine(kCirLow);
    CHECK(c.dprice_dx(0.05, 1.0) == doctest::Approx(-0.74502438998336989).epsilon(1e-13));
}

TEST_CASE("riccati integration agrees with the closed forms to 1e-10") {
    ModelSpec cir = make_model(ModelKind::CIR, kCirLow);
    AffineCoefficients closed = cir_affine(kCirLow);
    AffineCoefficients numeric = riccati_solve(cir, 3.0, 4096);
    for (double tau : {0.25, 0.8, 1.7, 3.0}) {
        CHECK(numeric.B(tau) == doctest::Approx(closed.B(tau)).epsilon(1e-10));
        CHECK(numeric.A(tau) == doctest::Approx(closed.A(tau)).epsilon(1e-10));
    }

    ModelSpec vas = make_model(ModelKind::Vasicek, kVasicek);
    AffineCoefficients vc = vasicek_affine(kVasicek);
    AffineCoefficients vn = riccati_solve(vas, 2.0, 4096);
    for (double tau : {0.5, 1.0, 2.0})
        CHECK(vn.price(0.03, tau) == doctest::Approx(vc.price(0.03, tau)).epsilon(1e-10));
}

TEST_CASE("hull-white with constant tables collapses to cir") {
    ParamSet hw;
    hw.scalars = {{"a", 0.01}, {"b", 0.5}, {"sigma", 0.3}};
    ModelSpec m = make_model(ModelKind::HullWhite, hw);
    AffineCoefficients numeric = riccati_solve(m, 2.0, 4096);
    AffineCoefficients closed = cir_affine(kCirLow);
    for (double tau : {0.5, 1.0, 2.0})
        CHECK(numeric.price(0.05, tau) ==
              doctest::Approx(closed.price(0.05, tau)).epsilon(1e-10));
}

TEST_CASE("riccati preconditions and domain limits") {
    ModelSpec dothan =
        make_model(ModelKind::Dothan, params({{"a", 0.05}, {"sigma", 0.2}}));
    CHECK_THROWS_AS(riccati_solve(dothan, 1.0, 2048), std::invalid_argument);

    ModelSpec cir = make_model(ModelKind::CIR, kCirLow);
    CHECK_THROWS_AS(riccati_solve(cir, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(riccati_solve(cir, -1.0, 2048), std::invalid_argument);

    AffineCoefficients numeric = riccati_solve(cir, 1.0, 2048);
    CHECK_THROWS_AS(numeric.B(1.5), std::domain_error);
    CHECK(numeric.B(0.0) == 0.0);
    CHECK(numeric.A(0.0) == 1.0);
}

TEST_CASE("affine boundary residual vanishes for cir and rejects whole-line models") {
    ModelSpec cir = make_model(ModelKind::CIR, kCirHigh);
    AffineCoefficients coeffs = cir_affine(kCirHigh);
    std::vector<double> taus;
    for (int i = 0; i <= 100; ++i) taus.push_back(2.0 * i / 100.0);
    CHECK(affine_boundary_check(coeffs, cir, taus) <= 1e-14);

    ModelSpec vas = make_model(ModelKind::Vasicek, kVasicek);
    AffineCoefficients vcoef = vasicek_affine(kVasicek);
    CHECK_THROWS_AS(affine_boundary_check(vcoef, vas, taus), std::domain_error);
}

TEST_CASE("affine u-provider evaluates tau = T - t") {
    AffineCoefficients c = cir_affine(kCirLow);
    auto u = u_provider_from_affine(c, 2.0);
    CHECK(u(0.05, 0.5) == doctest::Approx(c.price(0.05, 1.5)).epsilon(1e-15));
    CHECK(u(0.05, 2.0) == 1.0);
}

TEST_CASE("affine csv has tau, A, B columns at full precision") {
    AffineCoefficients c = cir_affine(kCirLow);
    std::ostringstream os;
    const double taus[] = {0.5, 1.0};
    write_affine_csv(c, taus, os);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "tau,A,B");
    std::getline(in, row);
    double tau, a, b;
    char comma;
    std::istringstream(row) >> tau >> comma >> a >> comma >> b;
    CHECK(tau == 0.5);
    CHECK(a == doctest::Approx(c.A(0.5)).epsilon(1e-15));
    CHECK(b == doctest::Approx(c.B(0.5)).epsilon(1e-15));
}

#include <catch2/catch.hpp>

#include "polyrank/sos.hpp"

using namespace polyrank;

namespace {

const Polynomial x = Polynomial::variable("x");
const Polynomial one = Polynomial::constant(1);

PatternInstance concrete_instance(std::vector<Polynomial> gamma, Polynomial target) {
    PatternInstance inst;
    inst.gamma = std::move(gamma);
    inst.target = SymbolicPolynomial(std::move(target));
    return inst;
}

/// target 2 - x^2 over {1 - x^2}: h0 = 1, h1 = 1 with Q = diag(1, 0).
SosWitness putinar_fixture_witness() {
    SosWitness w;
    w.multipliers = {one, one - x * x};
    w.bases = {{Monomial::unit(), Monomial::var("x")}, {Monomial::unit(), Monomial::var("x")}};
    w.gram = {{{1.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}};
    return w;
}

}  // namespace

TEST_CASE("putinar encoding has one block per gamma member plus one") {
    PatternInstance inst = concrete_instance(
        {one - x * x, Polynomial::constant(make_rational(1, 2)) - x},
        Polynomial::constant(2) - x * x);
    SdpProblem sdp;
    std::map<UnknownId, int> scalars;
    SosEncoding enc = sos_encode(inst, 2, SosMethod::Putinar, sdp, scalars, "t");
    REQUIRE(enc.block_indices.size() == 3);  // 1, 1 - x^2, 1/2 - x
    for (int b : enc.block_indices) {
        CHECK(sdp.blocks[b].dim == 2);  // basis (1, x)
        CHECK(sdp.blocks[b].basis ==
              std::vector<Monomial>{Monomial::unit(), Monomial::var("x")});
    }
    // monomials 1, x, x^2, x^3, x^4 can appear across the products
    CHECK(sdp.rows.size() == 5);
}

TEST_CASE("schmuedgen encoding uses all subset products") {
    PatternInstance inst =
        concrete_instance({one - x, one + x}, Polynomial::constant(2) - x);
    SdpProblem sdp;
    std::map<UnknownId, int> scalars;
    SosEncoding enc = sos_encode(inst, 2, SosMethod::Schmuedgen, sdp, scalars, "t");
    CHECK(enc.block_indices.size() == 4);  // 1, 1-x, 1+x, 1-x^2
}

TEST_CASE("the hand witness for 2 - x^2 satisfies the generated equalities") {
    PatternInstance inst =
        concrete_instance({one - x * x}, Polynomial::constant(2) - x * x);
    SdpProblem sdp;
    std::map<UnknownId, int> scalars;
    SosEncoding enc = sos_encode(inst, 2, SosMethod::Putinar, sdp, scalars, "t");

    SosWitness w = putinar_fixture_witness();
    SdpAssignment a;
    a.blocks = w.gram;
    for (const auto& row : sdp.rows)
        CHECK(a.row_value(sdp, row) == Approx(to_double(row.rhs)).margin(1e-12));
    (void)enc;
}

TEST_CASE("check_sos_witness accepts the fixture and rejects perturbations") {
    Polynomial target = Polynomial::constant(2) - x * x;
    SosWitness good = putinar_fixture_witness();
    SosCheckResult ok = check_sos_witness(target, good, 1e-6);
    CHECK(ok.ok);
    CHECK(ok.max_residual == 0.0);

    // eigenvalue perturbation: {1, -0.5} must be refused
    SosWitness indefinite = good;
    indefinite.gram[0] = {{1.0, 0.0}, {0.0, -0.5}};
    SosCheckResult bad1 = check_sos_witness(target, indefinite, 1e-6);
    CHECK_FALSE(bad1.ok);
    CHECK(bad1.failure.find("PSD") != std::string::npos);

    // a rotated indefinite matrix (zero diagonal, nonzero off-diagonal)
    SosWitness rotated = good;
    rotated.gram[0] = {{0.0, 0.5}, {0.5, 0.0}};
    CHECK_FALSE(check_sos_witness(target, rotated, 1e-6).ok);

    // shifting the target by 1 leaves residual exactly 1
    SosCheckResult bad2 =
        check_sos_witness(target + one, good, 1e-6);
    CHECK_FALSE(bad2.ok);
    CHECK(bad2.max_residual == Approx(1.0));

    // asymmetric Gram matrices are malformed
    SosWitness asym = good;
    asym.gram[0] = {{1.0, 0.25}, {0.0, 0.0}};
    CHECK_FALSE(check_sos_witness(target, asym, 1e-6).ok);
}

TEST_CASE("a slightly negative pivot within tolerance is accepted") {
    Polynomial target = Polynomial::constant(2) - x * x;
    SosWitness w = putinar_fixture_witness();
    w.gram[0][1][1] = -1e-9;
    CHECK(check_sos_witness(target, w, 1e-6).ok);
    w.gram[0][1][1] = -1e-3;
    CHECK_FALSE(check_sos_witness(target, w, 1e-6).ok);
}

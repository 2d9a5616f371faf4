#include <cmath>

#include <Eigen/SVD>

#include "doctest.h"
#include "wstate/excitation_space.hpp"
#include "wstate/hamiltonian.hpp"

using namespace wstate;

TEST_CASE("basis order for four superatoms") {
  const Basis basis({4, 80.0, 80.0}, false);
  const std::vector<std::string> expected{"R1", "E1", "c1", "f1", "c2", "E2", "R2", "f2",
                                          "c3", "E3", "R3", "f3", "c4", "E4", "R4"};
  REQUIRE(basis.size() == 15);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(basis[i].carrier_label() == expected[i]);
    CHECK(basis[i].label() == "psi" + std::to_string(i + 1));
    CHECK(basis[i].index == i);
  }
  const Basis open({4, 80.0, 80.0}, true);
  REQUIRE(open.size() == 16);
  CHECK(open.vacuum() == 15);
  CHECK(open[15].label() == "vac");
  CHECK_THROWS_AS(basis.vacuum(), std::out_of_range);
}

TEST_CASE("basis size is 4N-1, plus the vacuum") {
  for (int n = 2; n <= 10; ++n) {
    CHECK(Basis({n, 1.0, 1.0}, false).size() == static_cast<std::size_t>(4 * n - 1));
    CHECK(Basis({n, 1.0, 1.0}, true).size() == static_cast<std::size_t>(4 * n));
  }
}

TEST_CASE("two superatoms enumerate seven states") {
  // 2 Rydberg + 2 intermediate + 2 cavity + 1 fiber.
  const auto states = build_basis({2, 1.0, 1.0}, false);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& s : states) ++counts[static_cast<int>(s.kind)];
  CHECK(states.size() == 7);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 2);
  CHECK(counts[2] == 2);
  CHECK(counts[3] == 1);
}

TEST_CASE("index_of agrees with enumeration") {
  for (int n = 2; n <= 7; ++n) {
    const Basis basis({n, 1.0, 1.0}, true);
    for (const auto& s : basis.states()) CHECK(basis.index_of(s.kind, s.site) == s.index);
    CHECK_THROWS_AS(basis.fiber(n), std::out_of_range);
    CHECK_THROWS_AS(basis.rydberg(0), std::out_of_range);
  }
}

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(Basis({1, 1.0, 1.0}, false), std::domain_error);
  CHECK_THROWS_AS(Basis({4, 0.0, 1.0}, false), std::invalid_argument);
  CHECK_THROWS_AS(Basis({4, 1.0, -2.0}, false), std::invalid_argument);
}

TEST_CASE("W target places 1/sqrt(N) on every Rydberg state") {
  const Basis four({4, 80.0, 80.0}, false);
  const StateVector w = w_target(four);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const bool rydberg = i == 0 || i == 6 || i == 10 || i == 14;
    CHECK(std::abs(w(i) - Complex(rydberg ? 0.5 : 0.0)) < 1e-15);
  }
  const Basis three({3, 1.0, 1.0}, false);
  const StateVector w3 = w_target(three);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(w3(three.rydberg(k)) - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(w3.norm() - 1.0) < 1e-15);
}

TEST_CASE("four-superatom dark state has the known coefficients") {
  const Basis basis({4, 80.0, 80.0}, false);
  const StateVector phi = dark_state_phi(basis);
  const double r = 1.0 / std::sqrt(15.0);
  // psi2, psi4, ..., psi14 with 3, -1, 1, -1, 1, -1, 1.
  const std::vector<std::pair<int, double>> expected{{1, 3 * r},  {3, -r}, {5, r}, {7, -r},
                                                     {9, r},      {11, -r}, {13, r}};
  StateVector reference = StateVector::Zero(15);
  for (const auto& [i, c] : expected) reference(i) = c;
  CHECK((phi - reference).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((build_static(basis).matrix * phi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dark state matches the general closed form") {
  // (N-1) E1 - sum_k f_k + sum_{k>=2} E_k, norm sqrt(N^2 - 1).
  for (int n = 2; n <= 8; ++n) {
    const Basis basis({n, 5.0, 5.0}, false);
    StateVector reference = StateVector::Zero(basis.size());
    reference(basis.intermediate(1)) = n - 1.0;
    for (int k = 1; k < n; ++k) reference(basis.fiber(k)) = -1.0;
    for (int k = 2; k <= n; ++k) reference(basis.intermediate(k)) = 1.0;
    reference /= std::sqrt(n * n - 1.0);
    CHECK((dark_state_phi(basis) - reference).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("three-superatom dark state matches an SVD null-space oracle") {
  const Basis basis({3, 2.5, 2.5}, false);
  // The 8 non-Rydberg states carry the static couplings.
  std::vector<std::size_t> idx;
  for (const auto& s : basis.states())
    if (s.kind != CarrierKind::Rydberg) idx.push_back(s.index);
  const Eigen::MatrixXcd full = build_static(basis).matrix;
  Eigen::MatrixXcd block(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) block(i, j) = full(idx[i], idx[j]);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;
  const Eigen::MatrixXcd kernel = svd.matrixV().rightCols(block.cols() - rank);

  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(idx.size());
  const auto e1_pos = std::find(idx.begin(), idx.end(), basis.intermediate(1)) - idx.begin();
  e1(e1_pos) = 1.0;
  Eigen::VectorXcd proj = kernel * (kernel.adjoint() * e1);
  proj /= proj.norm();
  proj *= std::abs(proj(e1_pos)) / proj(e1_pos);

  const StateVector phi = dark_state_phi(basis);
  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(std::abs(phi(idx[i]) - proj(i)) < 1e-10);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(phi(basis.rydberg(k))) == 0.0);
}

TEST_CASE("distinguished states are normalized and orthogonal") {
  for (int n = 2; n <= 6; ++n) {
    const Basis basis({n, 3.0, 3.0}, n % 2 == 0);
    const StateVector psi1 = initial_state(basis);
    const StateVector w = w_target(basis);
    const StateVector phi = dark_state_phi(basis);
    const StateVector bright = bright_combination(basis);
    for (const StateVector* s : {&psi1, &w, &phi, &bright}) CHECK(std::abs(s->norm() - 1.0) < 1e-12);
    CHECK(std::abs(phi.dot(bright)) == 0.0);
    CHECK(std::abs(phi.dot(psi1)) == 0.0);
    CHECK(std::real(phi(basis.intermediate(1))) > 0.0);
  }
}

TEST_CASE("dark state requires equal couplings") {
  CHECK_THROWS_AS(dark_state_phi(Basis({4, 80.0, 60.0}, false)), std::domain_error);
}

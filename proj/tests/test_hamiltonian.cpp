#include <cmath>
#include <random>

#include "doctest.h"
#include "wstate/excitation_space.hpp"
#include "wstate/hamiltonian.hpp"
#include "wstate/pulses.hpp"

using namespace wstate;

TEST_CASE("static couplings follow the star topology") {
  const Basis basis({4, 7.0, 3.0}, false);
  const Eigen::MatrixXcd h = build_static(basis).matrix;
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(15, 15);
  auto link = [&](std::size_t a, std::size_t b, double g) { expected(a, b) = expected(b, a) = g; };
  for (int k = 1; k <= 4; ++k) link(basis.intermediate(k), basis.cavity(k), 7.0);
  for (int k = 1; k <= 3; ++k) {
    link(basis.fiber(k), basis.cavity(1), 3.0);
    link(basis.fiber(k), basis.cavity(k + 1), 3.0);
  }
  CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("drive couples E_k and R_k with the per-atom amplitude") {
  const Basis basis({3, 1.0, 1.0}, true);
  const std::vector<double> rabi{0.5, -1.5, 2.0};
  const Operator h = build_drive(basis, rabi);
  CHECK(h.hermitian);
  CHECK(h.hermiticity_defect() == 0.0);
  for (int k = 1; k <= 3; ++k) CHECK(h.matrix(basis.intermediate(k), basis.rydberg(k)) == Complex(rabi[k - 1]));
  CHECK(h.matrix.cwiseAbs().sum() == doctest::Approx(2.0 * (0.5 + 1.5 + 2.0)));
  CHECK_THROWS_AS(build_drive(basis, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("frame factors for four superatoms") {
  const EffectiveFrame frame = effective_frame(Basis({4, 80.0, 80.0}, false));
  CHECK(frame.s1 == doctest::Approx(3.0 / std::sqrt(15.0)).epsilon(1e-14));
  CHECK(frame.s2 == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("numeric s2 is 1/sqrt(N+1), not the printed 1/sqrt(N^2-1)") {
  for (int n = 2; n <= 8; ++n) {
    const EffectiveFrame frame = effective_frame(Basis({n, 2.0, 2.0}, false));
    CHECK(std::abs(frame.s1 - EffectiveFrame::s1_closed_form(n)) < 1e-12);
    CHECK(std::abs(frame.s2 - EffectiveFrame::s2_closed_form(n)) < 1e-12);
    const double printed = EffectiveFrame::s2_printed(n);
    if (n == 2) {
      CHECK(std::abs(frame.s2 - printed) < 1e-12);
    } else {
      CHECK(std::abs(frame.s2 - printed) > 1e-3);
    }
    // The printed value is the coupling of phi to a single Rydberg state.
    const Basis basis({n, 2.0, 2.0}, false);
    std::vector<double> rest(n, 1.0);
    rest[0] = 0.0;
    const Eigen::MatrixXcd drive = build_drive(basis, rest).matrix;
    const StateVector phi = dark_state_phi(basis);
    CHECK(std::abs((drive.row(basis.rydberg(2)) * phi)(0) - printed) < 1e-12);
  }
}

TEST_CASE("projected drive equals the effective Hamiltonian (brute force)") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> amp(-10.0, 10.0);
  for (int n = 2; n <= 6; ++n) {
    const Basis basis({n, 4.0, 4.0}, false);
    const EffectiveFrame frame = effective_frame(basis);
    const Eigen::MatrixXcd p0 = zeno_projector(basis).matrix;
    CHECK((p0 * p0 - p0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(p0.trace().real() - (n + 1)) < 1e-12);

    Eigen::MatrixXcd frame_basis(basis.size(), 3);
    frame_basis.col(0) = initial_state(basis);
    frame_basis.col(1) = dark_state_phi(basis);
    frame_basis.col(2) = bright_combination(basis);

    for (int trial = 0; trial < 5; ++trial) {
      const double omega1 = amp(rng);
      const double omega = amp(rng);
      std::vector<double> rabi(n, omega);
      rabi[0] = omega1;
      const Eigen::MatrixXcd h = build_drive(basis, rabi).matrix;
      const Eigen::MatrixXcd projected = p0 * h * p0;
      const FrameMatrix eff = effective_hamiltonian(frame.s1 * omega1, frame.s2 * omega);
      const Eigen::MatrixXcd embedded = frame_basis * eff * frame_basis.adjoint();
      CHECK((projected - embedded).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("static part annihilates the Zeno subspace") {
  const Basis basis({5, 9.0, 9.0}, false);
  const Eigen::MatrixXcd p0 = zeno_projector(basis).matrix;
  CHECK((build_static(basis).matrix * p0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(zeno_projector(Basis({5, 9.0, 8.0}, false)), std::domain_error);
}

TEST_CASE("physical amplitudes divide by the frame factors") {
  const PulseSet pulses = stirap_pulses({});
  const EffectiveFrame frame = effective_frame(Basis({4, 80.0, 80.0}, false));
  const double t = 0.6;
  const auto rabi = physical_rabi(pulses, frame, t);
  REQUIRE(rabi.size() == 4);
  CHECK(rabi[0] * frame.s1 == doctest::Approx(pulses.omega1(t)));
  for (int k = 1; k < 4; ++k) CHECK(rabi[k] * frame.s2 == doctest::Approx(pulses.omega2(t)));
}

TEST_CASE("effective eigensystem") {
  for (double theta : {-1.0, -0.3, 0.0, 0.7}) {
    const double op = 5.0;
    const auto es = effective_eigensystem(theta, op);
    const Eigen::Matrix3d h = effective_hamiltonian(op * std::sin(theta), op * std::cos(theta)).real();
    for (int j = 0; j < 3; ++j) {
      CHECK((h * es.vectors.col(j) - es.values(j) * es.vectors.col(j)).norm() < 1e-12);
    }
    CHECK((es.vectors.transpose() * es.vectors - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(es.values(0) == 0.0);
    CHECK(es.values(1) == doctest::Approx(op));
  }
  CHECK_THROWS_AS(effective_eigensystem(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("effective W target") {
  const FrameVector w = effective_w_target(4);
  CHECK(std::abs(w(0) - 0.5) < 1e-15);
  CHECK(std::abs(w(2) - std::sqrt(0.75)) < 1e-15);
  CHECK(std::abs(w.norm() - 1.0) < 1e-15);
}

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>

#include "ebnsim/rng.hpp"

// Exact density-matrix algebra for one entangled pair (4x4) and joint
// operations on two pairs (16x16): noise channels, entanglement swapping,
// DEJMPS purification and teleportation-channel extraction.
//
// Basis order is |00>, |01>, |10>, |11> with qubit A as the first tensor
// factor. Bell states are indexed 0..3 as (Phi+, Phi-, Psi+, Psi-); index k
// carries the Klein-four code (x = k>>1, z = k&1) so |B_k> = (X^x Z^z (x) I)
// |Phi+> and composition of outcomes is XOR of indices.
namespace ebnsim::qstate {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat8 = Eigen::Matrix<std::complex<double>, 8, 8>;
using Mat16 = Eigen::Matrix<std::complex<double>, 16, 16>;

enum class Qubit { A, B };

struct PairState {
    Mat4 rho = Mat4::Zero();
    std::int64_t created_at = 0;
    std::int64_t last_touched_a = 0;
    std::int64_t last_touched_b = 0;

    static PairState phi_plus(std::int64_t t = 0);
    static PairState werner(double fidelity, std::int64_t t = 0);
    static PairState bell_diag(const std::array<double, 4>& p, std::int64_t t = 0);
};

struct NoiseChannel {
    enum class Kind { None, Dephasing, Depolarizing, T1T2, DephaseProb, DepolarizeProb };
    Kind kind = Kind::None;
    double rate_hz = 0.0;  // Dephasing / Depolarizing
    double t1_ns = 0.0;    // T1T2
    double t2_ns = 0.0;
    double prob = 0.0;     // one-shot variants

    static NoiseChannel none();
    static NoiseChannel dephasing(double rate_hz);
    static NoiseChannel depolarizing(double rate_hz);
    static NoiseChannel t1t2(double t1_ns, double t2_ns);
    static NoiseChannel dephase_prob(double p);
    static NoiseChannel depolarize_prob(double p);
};

// Hermiticity / unit trace / PSD checks. Eigenvalues in [-1e-10, 0) are
// clipped and the matrix renormalized; larger violations throw.
void check_valid(const Mat4& rho);
Mat4 repair_psd(const Mat4& rho);

Mat4 apply_noise_rho(const Mat4& rho, Qubit q, const NoiseChannel& ch, double dt_ns);
PairState apply_noise(const PairState& st, Qubit q, const NoiseChannel& ch, double dt_ns);
Mat2 apply_noise_1q(const Mat2& rho, const NoiseChannel& ch, double dt_ns);

double fidelity_to_phi_plus(const Mat4& rho);
double fidelity_to_phi_plus(const PairState& st);

// Diagonal of rho in the Bell basis, order (Phi+, Phi-, Psi+, Psi-).
std::array<double, 4> bell_diagonal(const Mat4& rho);

// Exchanges the two tensor factors of a pair state.
Mat4 swapped_qubits(const Mat4& rho);

// Pauli X^x Z^z for Bell index k = (x<<1)|z, applied to one qubit.
Mat4 apply_pauli(const Mat4& rho, int bell_index, Qubit q);

struct SwapBranch {
    double prob = 0.0;
    Mat4 rho = Mat4::Zero();  // outer pair, uncorrected
};

// Bell measurement of ab's B qubit against bc's B qubit. Branch k is the
// normalized post-measurement state of (ab.A, bc.A) given outcome k.
std::array<SwapBranch, 4> swap_branches(const Mat4& ab, const Mat4& bc);

struct SwapResult {
    PairState pair;   // uncorrected outer pair
    int outcome = 0;  // Bell index, the classical correction message
    double prob = 0.0;
};
SwapResult swap(const PairState& ab, const PairState& bc, RngStream& rng);

// Pauli correction for a swap outcome, by convention applied at the
// destination-side qubit.
Mat4 apply_correction(const Mat4& rho, int outcome, Qubit q);

struct DejmpsMap {
    double success_prob = 0.0;
    Mat4 kept = Mat4::Zero();  // normalized post-selected pair
};

// Deterministic DEJMPS map: rotations, bilateral CNOT, Z measurement of the
// sacrificial pair, keep on coincidence.
DejmpsMap dejmps_map(const Mat4& pair1, const Mat4& pair2);
std::optional<PairState> dejmps(const PairState& pair1, const PairState& pair2, RngStream& rng);

// Choi matrix (trace 1, output (x) input ordering) of the single-qubit
// channel induced by teleporting through `pair` with ideal corrections.
Mat4 teleport_choi(const Mat4& pair);
Mat2 choi_apply(const Mat4& choi, const Mat2& rho_in);
// Pauli-twirled channel probabilities, order (I, Z, X, Y) matching the Bell
// index convention.
std::array<double, 4> pauli_twirl(const Mat4& choi);

// Correlated Z-basis measurement at both ends; returns (bit at A, bit at B).
std::pair<int, int> qber_sample(const PairState& st, RngStream& rng);

}  // namespace ebnsim::qstate

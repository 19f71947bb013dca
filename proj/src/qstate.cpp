#include "ebnsim/qstate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ebnsim::qstate {

namespace {

using std::complex;
using cd = complex<double>;

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = 1e-10;

const Mat2 kI2 = Mat2::Identity();

Mat2 pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

Mat2 pauli_y() {
    Mat2 m;
    m << cd(0, 0), cd(0, -1), cd(0, 1), cd(0, 0);
    return m;
}

Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

// Pauli X^x Z^z for Bell index k.
Mat2 klein_pauli(int k) {
    int x = (k >> 1) & 1;
    int z = k & 1;
    Mat2 m = kI2;
    if (z) m = pauli_z() * m;
    if (x) m = pauli_x() * m;
    return m;
}

Eigen::Vector4cd bell_vector(int k) {
    Eigen::Vector4cd phi;
    phi << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    Mat4 op = Mat4::Zero();
    Mat2 p = klein_pauli(k);
    // P (x) I
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) op(a * 2 + c, b * 2 + c) = p(a, b);
    return op * phi;
}

// rho' = sum_k K_k rho K_k^dag with single-qubit Kraus operators on one
// qubit of a pair.
Mat4 apply_kraus_1q(const Mat4& rho, Qubit q, const std::vector<Mat2>& kraus) {
    Mat4 out = Mat4::Zero();
    for (const Mat2& k2 : kraus) {
        Mat4 k4 = Mat4::Zero();
        if (q == Qubit::A) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c) k4(a * 2 + c, b * 2 + c) = k2(a, b);
        } else {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c) k4(c * 2 + a, c * 2 + b) = k2(a, b);
        }
        out += k4 * rho * k4.adjoint();
    }
    return out;
}

std::vector<Mat2> dephase_kraus(double p_z) {
    return {std::sqrt(1.0 - p_z) * kI2, std::sqrt(p_z) * pauli_z()};
}

std::vector<Mat2> depolarize_kraus(double w) {
    return {std::sqrt(1.0 - 0.75 * w) * kI2, std::sqrt(w / 4.0) * pauli_x(),
            std::sqrt(w / 4.0) * pauli_y(), std::sqrt(w / 4.0) * pauli_z()};
}

std::vector<Mat2> amplitude_damp_kraus(double gamma) {
    Mat2 k0, k1;
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return {k0, k1};
}

Mat16 kron44(const Mat4& a, const Mat4& b) {
    Mat16 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return out;
}

// Full 16x16 unitary of a single-qubit gate on qubit q of 4 qubits
// (q0 most significant).
Mat16 embed_1q(const Mat2& u, int q) {
    Mat16 out = Mat16::Zero();
    int shift = 3 - q;
    for (int i = 0; i < 16; ++i) {
        int bi = (i >> shift) & 1;
        int rest = i & ~(1 << shift);
        for (int bj = 0; bj < 2; ++bj) {
            int j = rest | (bj << shift);
            out(i, j) = u(bi, bj);
        }
    }
    return out;
}

Mat16 embed_cnot(int control, int target) {
    Mat16 out = Mat16::Zero();
    int cs = 3 - control, ts = 3 - target;
    for (int i = 0; i < 16; ++i) {
        int j = i;
        if ((i >> cs) & 1) j = i ^ (1 << ts);
        out(j, i) = 1.0;
    }
    return out;
}

}  // namespace

PairState PairState::phi_plus(std::int64_t t) {
    PairState st;
    Eigen::Vector4cd v = bell_vector(0);
    st.rho = v * v.adjoint();
    st.created_at = st.last_touched_a = st.last_touched_b = t;
    return st;
}

PairState PairState::werner(double fidelity, std::int64_t t) {
    double w = (4.0 * fidelity - 1.0) / 3.0;
    PairState st = phi_plus(t);
    st.rho = w * st.rho + (1.0 - w) * 0.25 * Mat4::Identity();
    return st;
}

PairState PairState::bell_diag(const std::array<double, 4>& p, std::int64_t t) {
    PairState st;
    st.rho = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4cd v = bell_vector(k);
        st.rho += p[k] * (v * v.adjoint());
    }
    st.created_at = st.last_touched_a = st.last_touched_b = t;
    return st;
}

NoiseChannel NoiseChannel::none() { return {}; }

NoiseChannel NoiseChannel::dephasing(double rate_hz) {
    if (rate_hz < 0) throw std::invalid_argument("dephasing: rate < 0");
    NoiseChannel c;
    c.kind = Kind::Dephasing;
    c.rate_hz = rate_hz;
    return c;
}

NoiseChannel NoiseChannel::depolarizing(double rate_hz) {
    if (rate_hz < 0) throw std::invalid_argument("depolarizing: rate < 0");
    NoiseChannel c;
    c.kind = Kind::Depolarizing;
    c.rate_hz = rate_hz;
    return c;
}

NoiseChannel NoiseChannel::t1t2(double t1_ns, double t2_ns) {
    if (t1_ns <= 0 || t2_ns <= 0) throw std::invalid_argument("t1t2: nonpositive time constant");
    if (t2_ns > 2.0 * t1_ns + 1e-9 * t1_ns) throw std::invalid_argument("t1t2: T2 > 2*T1");
    NoiseChannel c;
    c.kind = Kind::T1T2;
    c.t1_ns = t1_ns;
    c.t2_ns = t2_ns;
    return c;
}

NoiseChannel NoiseChannel::dephase_prob(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("dephase_prob: p outside [0,1]");
    NoiseChannel c;
    c.kind = Kind::DephaseProb;
    c.prob = p;
    return c;
}

NoiseChannel NoiseChannel::depolarize_prob(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("depolarize_prob: p outside [0,1]");
    NoiseChannel c;
    c.kind = Kind::DepolarizeProb;
    c.prob = p;
    return c;
}

void check_valid(const Mat4& rho) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() >= kHermTol)
        throw std::runtime_error("PairState: not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) >= kTraceTol || std::abs(rho.trace().imag()) >= kTraceTol)
        throw std::runtime_error("PairState: trace != 1");
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::runtime_error("PairState: not positive semidefinite");
}

Mat4 repair_psd(const Mat4& rho) {
    Mat4 herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat4> es(herm);
    Eigen::Vector4d ev = es.eigenvalues();
    if (ev.minCoeff() < -kPsdTol) throw std::runtime_error("PairState: PSD violation beyond repair tolerance");
    Eigen::Vector4d clipped = ev.cwiseMax(0.0);
    Mat4 out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    double tr = out.trace().real();
    if (tr <= 0.0) throw std::runtime_error("PairState: zero trace after repair");
    return out / tr;
}

Mat4 apply_noise_rho(const Mat4& rho, Qubit q, const NoiseChannel& ch, double dt_ns) {
    if (dt_ns < 0) throw std::invalid_argument("apply_noise: negative duration");
    switch (ch.kind) {
        case NoiseChannel::Kind::None:
            return rho;
        case NoiseChannel::Kind::Dephasing: {
            double p_z = 0.5 * (1.0 - std::exp(-ch.rate_hz * dt_ns * 1e-9));
            return apply_kraus_1q(rho, q, dephase_kraus(p_z));
        }
        case NoiseChannel::Kind::Depolarizing: {
            double w = 1.0 - std::exp(-ch.rate_hz * dt_ns * 1e-9);
            return apply_kraus_1q(rho, q, depolarize_kraus(w));
        }
        case NoiseChannel::Kind::T1T2: {
            double gamma = 1.0 - std::exp(-dt_ns / ch.t1_ns);
            Mat4 out = apply_kraus_1q(rho, q, amplitude_damp_kraus(gamma));
            double inv_t2phi = 1.0 / ch.t2_ns - 0.5 / ch.t1_ns;
            if (inv_t2phi > 0) {
                double p_z = 0.5 * (1.0 - std::exp(-dt_ns * inv_t2phi));
                out = apply_kraus_1q(out, q, dephase_kraus(p_z));
            }
            return out;
        }
        case NoiseChannel::Kind::DephaseProb:
            return apply_kraus_1q(rho, q, dephase_kraus(ch.prob));
        case NoiseChannel::Kind::DepolarizeProb:
            return apply_kraus_1q(rho, q, depolarize_kraus(ch.prob));
    }
    return rho;
}

PairState apply_noise(const PairState& st, Qubit q, const NoiseChannel& ch, double dt_ns) {
    PairState out = st;
    out.rho = repair_psd(apply_noise_rho(st.rho, q, ch, dt_ns));
    return out;
}

Mat2 apply_noise_1q(const Mat2& rho, const NoiseChannel& ch, double dt_ns) {
    // embed as the A factor of rho (x) I/2, evolve, trace out B
    Mat4 joint = Mat4::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) joint(a * 2 + c, b * 2 + c) = 0.5 * rho(a, b);
    Mat4 evolved = apply_noise_rho(joint, Qubit::A, ch, dt_ns);
    Mat2 out = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) out(a, b) += evolved(a * 2 + c, b * 2 + c);
    return out;
}

double fidelity_to_phi_plus(const Mat4& rho) {
    Eigen::Vector4cd v = bell_vector(0);
    return std::real((v.adjoint() * rho * v)(0, 0));
}

double fidelity_to_phi_plus(const PairState& st) { return fidelity_to_phi_plus(st.rho); }

std::array<double, 4> bell_diagonal(const Mat4& rho) {
    std::array<double, 4> p{};
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4cd v = bell_vector(k);
        p[k] = std::real((v.adjoint() * rho * v)(0, 0));
    }
    return p;
}

Mat4 swapped_qubits(const Mat4& rho) {
    auto perm = [](int i) { return ((i & 1) << 1) | ((i >> 1) & 1); };
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = rho(perm(i), perm(j));
    return out;
}

Mat4 apply_pauli(const Mat4& rho, int bell_index, Qubit q) {
    Mat2 p = klein_pauli(bell_index);
    return apply_kraus_1q(rho, q, {p});
}

std::array<SwapBranch, 4> swap_branches(const Mat4& ab, const Mat4& bc) {
    // Joint qubit order (A, B1, B2, C); measure (B1, B2) in the Bell basis.
    Mat16 joint = kron44(ab, bc);
    std::array<SwapBranch, 4> branches;
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4cd bk = bell_vector(k);
        Mat4 out = Mat4::Zero();
        // out(a c, a' c') = sum over middle indices of conj(bk) rho bk
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c)
                for (int ap = 0; ap < 2; ++ap)
                    for (int cp = 0; cp < 2; ++cp) {
                        cd acc = 0.0;
                        for (int b1 = 0; b1 < 2; ++b1)
                            for (int b2 = 0; b2 < 2; ++b2)
                                for (int b1p = 0; b1p < 2; ++b1p)
                                    for (int b2p = 0; b2p < 2; ++b2p) {
                                        int row = (((a * 2 + b1) * 2 + b2) * 2 + c);
                                        int col = (((ap * 2 + b1p) * 2 + b2p) * 2 + cp);
                                        acc += std::conj(bk(b1 * 2 + b2)) * joint(row, col) *
                                               bk(b1p * 2 + b2p);
                                    }
                        out(a * 2 + c, ap * 2 + cp) = acc;
                    }
        double prob = out.trace().real();
        branches[k].prob = prob;
        branches[k].rho = prob > 1e-15 ? Mat4((out / prob).eval()) : Mat4::Zero();
    }
    return branches;
}

SwapResult swap(const PairState& ab, const PairState& bc, RngStream& rng) {
    auto branches = swap_branches(ab.rho, bc.rho);
    std::array<double, 4> probs{};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        probs[k] = branches[k].prob;
        total += probs[k];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("swap: degenerate outcome distribution");
    int k = rng.sample_discrete(probs);
    SwapResult res;
    res.outcome = k;
    res.prob = probs[k];
    res.pair.rho = repair_psd(branches[k].rho);
    std::int64_t t = std::max({ab.created_at, bc.created_at});
    res.pair.created_at = t;
    res.pair.last_touched_a = ab.last_touched_a;
    res.pair.last_touched_b = bc.last_touched_a;
    return res;
}

Mat4 apply_correction(const Mat4& rho, int outcome, Qubit q) {
    return apply_pauli(rho, outcome, q);
}

DejmpsMap dejmps_map(const Mat4& pair1, const Mat4& pair2) {
    // Qubits (A1, B1, A2, B2); Alice holds A1,A2; Bob holds B1,B2.
    Mat16 joint = Mat16::Zero();
    // reorder kron(pair1, pair2) from (A1,B1,A2,B2): kron already gives that
    // order with pair1 on the two most significant bits.
    joint = kron44(pair1, pair2);

    const cd i1(0.0, 1.0);
    Mat2 rx_plus, rx_minus;
    double s = 1.0 / std::sqrt(2.0);
    rx_plus << s, -i1 * s, -i1 * s, s;   // exp(-i pi/4 X)
    rx_minus << s, i1 * s, i1 * s, s;    // exp(+i pi/4 X)

    Mat16 u = embed_1q(rx_plus, 0) * embed_1q(rx_plus, 2) * embed_1q(rx_minus, 1) *
              embed_1q(rx_minus, 3);
    u = embed_cnot(0, 2) * embed_cnot(1, 3) * u;
    Mat16 evolved = u * joint * u.adjoint();

    // Z measurement on A2 (q2) and B2 (q3); keep coincidences 00 and 11.
    Mat4 kept = Mat4::Zero();
    double p_success = 0.0;
    for (int m : {0, 3}) {  // (mA2, mB2) = (0,0) or (1,1)
        int b2 = (m >> 1) & 1, b3 = m & 1;
        Mat4 proj = Mat4::Zero();
        for (int a1 = 0; a1 < 2; ++a1)
            for (int b1 = 0; b1 < 2; ++b1)
                for (int a1p = 0; a1p < 2; ++a1p)
                    for (int b1p = 0; b1p < 2; ++b1p) {
                        int row = (((a1 * 2 + b1) * 2 + b2) * 2 + b3);
                        int col = (((a1p * 2 + b1p) * 2 + b2) * 2 + b3);
                        proj(a1 * 2 + b1, a1p * 2 + b1p) += evolved(row, col);
                    }
        p_success += proj.trace().real();
        kept += proj;
    }
    DejmpsMap res;
    res.success_prob = p_success;
    res.kept = p_success > 1e-15 ? Mat4((kept / p_success).eval()) : Mat4::Zero();
    return res;
}

std::optional<PairState> dejmps(const PairState& pair1, const PairState& pair2, RngStream& rng) {
    DejmpsMap m = dejmps_map(pair1.rho, pair2.rho);
    if (!rng.bernoulli(m.success_prob)) return std::nullopt;
    PairState out;
    out.rho = repair_psd(m.kept);
    out.created_at = std::max(pair1.created_at, pair2.created_at);
    out.last_touched_a = std::max(pair1.last_touched_a, pair2.last_touched_a);
    out.last_touched_b = std::max(pair1.last_touched_b, pair2.last_touched_b);
    return out;
}

Mat4 teleport_choi(const Mat4& pair) {
    // Channel on the input qubit: Bell-measure (input, pair.A), correct
    // pair.B with X^x Z^z for outcome (x,z).
    auto channel = [&pair](const Mat2& rho_in) {
        // Qubits (in, A, B); 8x8 joint.
        Mat8 joint = Mat8::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                joint.block<4, 4>(4 * i, 4 * j) = rho_in(i, j) * pair;
        Mat2 out = Mat2::Zero();
        for (int k = 0; k < 4; ++k) {
            Eigen::Vector4cd bk = bell_vector(k);
            Mat2 branch = Mat2::Zero();
            for (int b = 0; b < 2; ++b)
                for (int bp = 0; bp < 2; ++bp) {
                    cd acc = 0.0;
                    for (int i = 0; i < 2; ++i)
                        for (int a = 0; a < 2; ++a)
                            for (int ip = 0; ip < 2; ++ip)
                                for (int ap = 0; ap < 2; ++ap)
                                    acc += std::conj(bk(i * 2 + a)) * joint((i * 4 + a * 2 + b), (ip * 4 + ap * 2 + bp)) *
                                           bk(ip * 2 + ap);
                    branch(b, bp) = acc;
                }
            Mat2 corr = klein_pauli(k);
            out += corr * branch * corr.adjoint();
        }
        return out;
    };

    // Choi on (out (x) in) from the action on matrix units.
    Mat4 choi = Mat4::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat2 unit = Mat2::Zero();
            unit(i, j) = 1.0;
            Mat2 mapped = channel(unit);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) choi(a * 2 + i, b * 2 + j) += 0.5 * mapped(a, b);
        }
    return choi;
}

Mat2 choi_apply(const Mat4& choi, const Mat2& rho_in) {
    Mat2 out = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cd acc = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) acc += rho_in(j, i) * choi(a * 2 + j, b * 2 + i);
            out(a, b) = 2.0 * acc;
        }
    return out;
}

std::array<double, 4> pauli_twirl(const Mat4& choi) {
    std::array<double, 4> p{};
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4cd v = bell_vector(k);
        p[k] = std::real((v.adjoint() * choi * v)(0, 0));
    }
    return p;
}

std::pair<int, int> qber_sample(const PairState& st, RngStream& rng) {
    std::array<double, 4> probs{};
    for (int i = 0; i < 4; ++i) probs[i] = std::max(0.0, std::real(st.rho(i, i)));
    int i = rng.sample_discrete(probs);
    return {(i >> 1) & 1, i & 1};
}

}  // namespace ebnsim::qstate

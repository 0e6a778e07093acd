#include "nfg/problems.hpp"

#include <algorithm>
#include <cmath>

namespace nfg {

namespace {

std::optional<double> max_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return *std::max_element(v.begin(), v.end());
}

std::optional<double> min_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return *std::min_element(v.begin(), v.end());
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// loose smoothness bound max_i ||A_i||^2; an all-zero design carries none
std::optional<double> max_row_norm_sq(const std::vector<ParamVector>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, norm_sq(r));
  if (m == 0.0) return std::nullopt;
  return m;
}

}  // namespace

// ------------------------------- Quadratic --------------------------------

QuadraticProblem::QuadraticProblem(std::vector<ParamVector> anchors,
                                   std::vector<double> curvatures)
    : FiniteSumOracle(anchors.size(), anchors.empty() ? 0 : anchors.front().size(),
                      max_of(curvatures), min_of(curvatures)),
      anchors_(std::move(anchors)),
      curvatures_(std::move(curvatures)) {
  if (anchors_.size() != curvatures_.size())
    throw ContractViolation("anchor/curvature count mismatch");
  for (const auto& a : anchors_) {
    if (a.size() != dimension()) throw ContractViolation("anchor dimension mismatch");
  }
  for (double q : curvatures_) {
    if (!(q > 0.0)) throw ContractViolation("curvatures must be positive");
  }
}

double QuadraticProblem::component_loss(std::size_t i, const ParamVector& x) const {
  double s = 0.0;
  const ParamVector& a = anchors_[i];
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = x[k] - a[k];
    s += r * r;
  }
  return 0.5 * curvatures_[i] * s;
}

void QuadraticProblem::component_gradient_raw(std::size_t i, const ParamVector& x,
                                              ParamVector& out) const {
  out.resize(x.size());
  const ParamVector& a = anchors_[i];
  const double q = curvatures_[i];
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = q * (x[k] - a[k]);
}

ParamVector QuadraticProblem::minimizer() const {
  ParamVector m = zeros(dimension());
  double total = 0.0;
  for (std::size_t i = 0; i < component_count(); ++i) {
    axpy(m, curvatures_[i], anchors_[i]);
    total += curvatures_[i];
  }
  for (double& v : m) v /= total;
  return m;
}

double QuadraticProblem::optimal_value() const {
  const ParamVector star = minimizer();
  double acc = 0.0;
  for (std::size_t i = 0; i < component_count(); ++i) acc += component_loss(i, star);
  return acc / static_cast<double>(component_count());
}

// ----------------------------- Sigmoid LSQ ---------------------------------

SigmoidLsqProblem::SigmoidLsqProblem(std::vector<ParamVector> rows,
                                     std::vector<double> targets)
    : FiniteSumOracle(rows.size(), rows.empty() ? 0 : rows.front().size(),
                      max_row_norm_sq(rows)),
      rows_(std::move(rows)),
      targets_(std::move(targets)) {
  if (rows_.size() != targets_.size())
    throw ContractViolation("row/target count mismatch");
  for (const auto& r : rows_) {
    if (r.size() != dimension()) throw ContractViolation("row dimension mismatch");
  }
  for (double y : targets_) {
    if (!(y >= 0.0 && y <= 1.0)) throw ContractViolation("targets must lie in [0,1]");
  }
}

double SigmoidLsqProblem::component_loss(std::size_t i, const ParamVector& x) const {
  const double h = sigmoid(dot(rows_[i], x));
  const double r = targets_[i] - h;
  return r * r;
}

void SigmoidLsqProblem::component_gradient_raw(std::size_t i, const ParamVector& x,
                                               ParamVector& out) const {
  const double h = sigmoid(dot(rows_[i], x));
  const double coeff = -2.0 * (targets_[i] - h) * h * (1.0 - h);
  out.resize(x.size());
  const ParamVector& a = rows_[i];
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = coeff * a[k];
}

// ------------------------------ Zero chain ---------------------------------

double psi(double z) {
  if (z <= 0.5) return 0.0;
  const double u = 2.0 * z - 1.0;
  const double inv = 1.0 / (u * u);
  if (inv > 746.0) return 0.0;  // exp underflows; avoids inf/NaN downstream
  return std::exp(1.0 - inv);
}

double psi_prime(double z) {
  if (z <= 0.5) return 0.0;
  const double u = 2.0 * z - 1.0;
  const double inv = 1.0 / (u * u);
  if (inv > 746.0) return 0.0;
  return std::exp(1.0 - inv) * 4.0 / (u * u * u);
}

double phi(double z) {
  // sqrt(e) * integral = sqrt(e * pi / 2) * erfc(-z / sqrt(2))
  static const double kFront = std::sqrt(std::exp(1.0) * M_PI / 2.0);
  return kFront * std::erfc(-z / std::sqrt(2.0));
}

double phi_prime(double z) {
  static const double kSqrtE = std::sqrt(std::exp(1.0));
  return kSqrtE * std::exp(-0.5 * z * z);
}

std::size_t prog(const ParamVector& x) {
  for (std::size_t k = x.size(); k > 0; --k) {
    if (x[k - 1] != 0.0) return k;
  }
  return 0;
}

double zero_chain_lj_value(std::size_t j, const ParamVector& x) {
  if (j == 0 || j > x.size()) throw ContractViolation("chain index out of range");
  if (j == 1) return -psi(1.0) * phi(x[0]);
  const double a = x[j - 2];
  const double b = x[j - 1];
  return psi(-a) * phi(-b) - psi(a) * phi(b);
}

void zero_chain_lj_gradient_accumulate(std::size_t j, const ParamVector& x,
                                       ParamVector& acc) {
  if (j == 0 || j > x.size()) throw ContractViolation("chain index out of range");
  if (j == 1) {
    acc[0] += -psi(1.0) * phi_prime(x[0]);
    return;
  }
  const double a = x[j - 2];
  const double b = x[j - 1];
  acc[j - 2] += -psi_prime(-a) * phi(-b) - psi_prime(a) * phi(b);
  acc[j - 1] += -psi(-a) * phi_prime(-b) - psi(a) * phi_prime(b);
}

double zero_chain_l_value(const ParamVector& x) {
  double s = 0.0;
  for (std::size_t j = 1; j <= x.size(); ++j) s += zero_chain_lj_value(j, x);
  return s;
}

ParamVector zero_chain_l_gradient(const ParamVector& x) {
  ParamVector g = zeros(x.size());
  for (std::size_t j = 1; j <= x.size(); ++j) zero_chain_lj_gradient_accumulate(j, x, g);
  return g;
}

ZeroChainProblem::ZeroChainProblem(std::size_t d, std::size_t n, double target_smoothness,
                                   double scale)
    : FiniteSumOracle(n, d, target_smoothness),
      scale_(scale),
      outer_factor_(target_smoothness * scale * scale / kChainSmoothness),
      blocks_(n) {
  if (!(scale > 0.0)) throw ContractViolation("scale must be positive");
  for (std::size_t j = 1; j <= d; ++j) {
    // 1-based component i in {1..n} owns j == i (mod n); internal index is i-1
    std::size_t residue = j % n;
    std::size_t internal = (residue == 0) ? n - 1 : residue - 1;
    blocks_[internal].push_back(j);
  }
}

double ZeroChainProblem::component_loss(std::size_t i, const ParamVector& x) const {
  ParamVector u(x.size());
  const double inv_c = 1.0 / scale_;
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = x[k] * inv_c;
  double s = 0.0;
  for (std::size_t j : blocks_[i]) s += zero_chain_lj_value(j, u);
  return outer_factor_ * s;
}

void ZeroChainProblem::component_gradient_raw(std::size_t i, const ParamVector& x,
                                              ParamVector& out) const {
  ParamVector u(x.size());
  const double inv_c = 1.0 / scale_;
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = x[k] * inv_c;
  out.assign(x.size(), 0.0);
  for (std::size_t j : blocks_[i]) zero_chain_lj_gradient_accumulate(j, u, out);
  const double factor = outer_factor_ * inv_c;
  for (double& v : out) v *= factor;
}

}  // namespace nfg

#include "mcsd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace mcsd {

Mat Objective::stochastic_grad(const Mat&, RngStream&, const NoiseConfig&) const {
  throw ConfigError("objective does not provide stochastic gradients");
}

namespace {

void validate_weights(const std::vector<double>& dmat) {
  if (dmat.empty()) throw ConfigError("brockett: weight vector is empty");
  for (std::size_t i = 0; i < dmat.size(); ++i) {
    if (!(dmat[i] >= 0.0)) throw ConfigError("brockett: weights must be nonnegative");
    if (i > 0 && dmat[i] > dmat[i - 1]) throw ConfigError("brockett: weights must be nonincreasing");
  }
}

Mat symmetric_from_gram(const Mat& x) {
  Mat c = x * x.transpose();
  return sym(c);
}

}  // namespace

BrockettInstance::BrockettInstance(Mat c, Mat data, std::vector<double> dmat, std::uint64_t seed)
    : c_(std::move(c)), data_(std::move(data)), dmat_(std::move(dmat)), data_seed_(seed) {
  validate_weights(dmat_);
  const long n = static_cast<long>(c_.rows());
  const long p = static_cast<long>(dmat_.size());
  if (c_.rows() != c_.cols()) throw ConfigError("brockett: covariance must be square");
  if (p > n) throw ConfigError("brockett: requires p <= n");
  if ((c_ - c_.transpose()).norm() > 1e-10 * std::max(1.0, c_.norm()))
    throw ConfigError("brockett: covariance is not symmetric");

  using ColMat = Eigen::MatrixXd;
  Eigen::SelfAdjointEigenSolver<ColMat> es{ColMat(c_)};
  if (es.info() != Eigen::Success) throw NumericError("brockett: eigendecomposition failed");
  eigenvalues_.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) eigenvalues_[i] = es.eigenvalues()(n - 1 - i);

  w_star_.resize(n, p);
  for (long j = 0; j < p; ++j) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 1 - j);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    w_star_.col(j) = v;
  }

  if (p < n) {
    const double gap = eigenvalues_[p - 1] - eigenvalues_[p];
    if (gap < 1e-8 * std::abs(eigenvalues_[0]))
      warnings_.push_back("small eigengap lambda_p - lambda_{p+1} = " + std::to_string(gap));
  }
}

BrockettInstance BrockettInstance::generate(long n, long p, long d, std::uint64_t data_seed) {
  if (p < 1 || p > n || n > d) throw ConfigError("brockett: requires 1 <= p <= n <= d");
  RngStream rng(data_seed);
  Mat x = rng.gaussian(n, d);
  std::vector<double> dmat(static_cast<std::size_t>(p));
  for (long i = 0; i < p; ++i) dmat[i] = static_cast<double>(p - i);
  return from_data(std::move(x), std::move(dmat), data_seed);
}

BrockettInstance BrockettInstance::from_data(Mat data, std::vector<double> dmat, std::uint64_t data_seed) {
  Mat c = symmetric_from_gram(data);
  return BrockettInstance(std::move(c), std::move(data), std::move(dmat), data_seed);
}

BrockettInstance BrockettInstance::from_covariance(Mat c, std::vector<double> dmat) {
  const Eigen::Index n = c.rows();
  return BrockettInstance(std::move(c), Mat(n, 0), std::move(dmat), 0);
}

double BrockettInstance::value(const Mat& w) const {
  if (w.rows() != n() || w.cols() != p()) throw ConfigError("brockett: point has wrong shape");
  const Mat cw = c_ * w;
  double acc = 0.0;
  for (long j = 0; j < p(); ++j) acc += dmat_[j] * w.col(j).dot(cw.col(j));
  return -0.5 * acc;
}

Mat BrockettInstance::euclid_grad(const Mat& w) const {
  if (w.rows() != n() || w.cols() != p()) throw ConfigError("brockett: point has wrong shape");
  Mat g = c_ * w;
  for (long j = 0; j < p(); ++j) g.col(j) *= -dmat_[j];
  return g;
}

Mat BrockettInstance::stochastic_grad(const Mat& w, RngStream& rng, const NoiseConfig& noise) const {
  if (const auto* add = std::get_if<AdditiveGaussian>(&noise)) {
    if (!(add->sigma_entry >= 0.0)) throw ConfigError("noise: sigma_entry must be >= 0");
    Mat g = euclid_grad(w);
    for (long i = 0; i < g.rows(); ++i)
      for (long j = 0; j < g.cols(); ++j) g(i, j) += add->sigma_entry * rng.normal();
    return g;
  }
  const long batch = std::get<Minibatch>(noise).batch_size;
  const long total = d();
  if (total == 0) throw ConfigError("noise: minibatch gradients need the sample matrix");
  if (batch < 1 || batch > total) throw ConfigError("noise: batch size must be in [1, d]");

  Mat xb(n(), batch);
  if (batch == total) {
    xb = data_;
  } else {
    // Partial Fisher-Yates: uniform sample without replacement.
    std::vector<long> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0L);
    for (long k = 0; k < batch; ++k) {
      const long j = k + static_cast<long>(rng.below(static_cast<std::uint64_t>(total - k)));
      std::swap(idx[k], idx[j]);
      xb.col(k) = data_.col(idx[k]);
    }
  }
  const double scale = static_cast<double>(total) / static_cast<double>(batch);
  Mat g = xb * (xb.transpose() * w);
  for (long j = 0; j < p(); ++j) g.col(j) *= -scale * dmat_[j];
  return g;
}

double BrockettInstance::subspace_error(const Mat& w) const {
  if (w.rows() != n() || w.cols() != p()) throw ConfigError("brockett: point has wrong shape");
  const Mat diff = w * w.transpose() - w_star_ * w_star_.transpose();
  return diff.norm();
}

SmoothnessConstants BrockettInstance::smoothness_constants() const {
  // c is PSD when built from data; for an explicit covariance use |lambda|.
  const double c_norm = std::max(std::abs(eigenvalues_.front()), std::abs(eigenvalues_.back()));
  const double dmax = *std::max_element(dmat_.begin(), dmat_.end());
  const double l_f = c_norm * dmax;
  const double g_bound = c_norm * dmax * std::sqrt(static_cast<double>(p()));
  return {l_f, g_bound, 4.0 * l_f + 25.0 * g_bound};
}

double BrockettInstance::optimal_value() const {
  double acc = 0.0;
  for (long j = 0; j < p(); ++j) acc += dmat_[j] * eigenvalues_[j];
  return -0.5 * acc;
}

namespace {

constexpr char kMagic[8] = {'M', 'C', 'S', 'D', 'B', 'R', 'K', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("instance file truncated");
  return v;
}

}  // namespace

void BrockettInstance::save(const std::filesystem::path& path) const {
  if (d() == 0) throw ConfigError("instance export needs the sample matrix");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance file " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(n()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(p()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(d()));
  put<std::uint64_t>(out, data_seed_);
  for (double w : dmat_) put(out, w);
  for (long i = 0; i < n(); ++i)
    for (long j = 0; j < d(); ++j) put(out, data_(i, j));
  if (!out) throw IoError("failed writing instance file " + path.string());
}

BrockettInstance BrockettInstance::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read instance file " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a Brockett instance file: " + path.string());
  const auto n = static_cast<long>(get<std::uint64_t>(in));
  const auto p = static_cast<long>(get<std::uint64_t>(in));
  const auto d = static_cast<long>(get<std::uint64_t>(in));
  const auto seed = get<std::uint64_t>(in);
  if (p < 1 || p > n || n > d || d > (1L << 24)) throw IoError("corrupt instance header");
  std::vector<double> dmat(static_cast<std::size_t>(p));
  for (auto& w : dmat) w = get<double>(in);
  Mat x(n, d);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < d; ++j) x(i, j) = get<double>(in);
  return from_data(std::move(x), std::move(dmat), seed);
}

}  // namespace mcsd

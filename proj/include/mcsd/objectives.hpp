#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "mcsd/linalg.hpp"
#include "mcsd/random.hpp"
#include "mcsd/stiefel.hpp"

namespace mcsd {

struct AdditiveGaussian {
  double sigma_entry = 0.0;
};

struct Minibatch {
  long batch_size = 1;
};

/// Noise model for stochastic gradients.
using NoiseConfig = std::variant<AdditiveGaussian, Minibatch>;

/// Smooth objective over R^{n x p}.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double value(const Mat& x) const = 0;
  virtual Mat euclid_grad(const Mat& x) const = 0;

  virtual bool has_stochastic_grad() const { return false; }
  /// Unbiased estimate of euclid_grad(x).
  virtual Mat stochastic_grad(const Mat& x, RngStream& rng, const NoiseConfig& noise) const;
};

struct SmoothnessConstants {
  double l_f;         // Lipschitz constant of the Euclidean gradient on St(n, p)
  double g_bound;     // bound on ||grad f||_F over St(n, p)
  double l_composed;  // 4 l_f + 25 g_bound, valid in the radius-0.2 spectral tube
};

/// Weighted PCA / Brockett cost f(W) = -1/2 tr(W^T C W D) with C = X X^T.
class BrockettInstance final : public Objective {
 public:
  /// Gaussian data X in R^{n x d}, weights D = diag(p, p-1, ..., 1).
  static BrockettInstance generate(long n, long p, long d, std::uint64_t data_seed);
  /// From explicit data with custom weights.
  static BrockettInstance from_data(Mat data, std::vector<double> dmat, std::uint64_t data_seed = 0);
  /// From an explicit covariance (no sample matrix; minibatch noise unavailable).
  static BrockettInstance from_covariance(Mat c, std::vector<double> dmat);

  double value(const Mat& w) const override;
  Mat euclid_grad(const Mat& w) const override;
  bool has_stochastic_grad() const override { return true; }
  Mat stochastic_grad(const Mat& w, RngStream& rng, const NoiseConfig& noise) const override;

  /// ||w w^T - w* w*^T||_F.
  double subspace_error(const Mat& w) const;
  SmoothnessConstants smoothness_constants() const;
  /// f(w*) = -1/2 sum_i d_i lambda_i, the minimum over St(n, p).
  double optimal_value() const;

  long n() const { return static_cast<long>(c_.rows()); }
  long p() const { return static_cast<long>(dmat_.size()); }
  long d() const { return static_cast<long>(data_.cols()); }
  std::uint64_t data_seed() const { return data_seed_; }
  const Mat& c() const { return c_; }
  const Mat& data() const { return data_; }
  const std::vector<double>& dmat() const { return dmat_; }
  const Mat& w_star() const { return w_star_; }
  /// Eigenvalues of c, descending.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Binary container: magic, (n, p, d, seed), weights, then the sample matrix.
  void save(const std::filesystem::path& path) const;
  static BrockettInstance load(const std::filesystem::path& path);

 private:
  BrockettInstance(Mat c, Mat data, std::vector<double> dmat, std::uint64_t seed);

  Mat c_;
  Mat data_;
  std::vector<double> dmat_;
  Mat w_star_;
  std::vector<double> eigenvalues_;
  std::uint64_t data_seed_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace mcsd

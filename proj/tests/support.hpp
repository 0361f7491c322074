#pragma once

// Shared helpers for the unit tests: seeded random tensors, an independent
// finite-difference gradient, scratch directories and a convex-hull oracle.

#include <Eigen/Dense>

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chase/core/autodiff.hpp"

namespace testing {

using chase::Index;
using chase::Shape;
using chase::TensorXd;
using chase::Value;

inline TensorXd random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  TensorXd t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

/// Central differences, written independently of the library's grad_check.
inline TensorXd numeric_grad(const std::function<double(const TensorXd&)>& f, TensorXd x, double eps = 1e-6) {
  TensorXd g(x.shape());
  for (Index i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double fp = f(x);
    x[i] = orig - eps;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * eps);
  }
  return g;
}

inline TensorXd analytic_grad(const std::function<Value(const Value&)>& f, const TensorXd& x) {
  Value v(x, true);
  chase::backward(f(v));
  return v.grad();
}

inline double max_rel_diff(const TensorXd& a, const TensorXd& b, double floor = 1e-8) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, d);
  }
  return worst;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("chase-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Is p a convex combination of the columns of X (C x U)? By Caratheodory it
/// suffices to find an affinely independent subset of at most C + 1 columns
/// whose barycentric coordinates for p are all non-negative. Exhaustive over
/// subsets, so only meant for small U.
inline bool in_convex_hull(const Eigen::MatrixXd& X, const Eigen::VectorXd& p, double tol = 1e-9) {
  const Index C = X.rows(), U = X.cols();
  std::vector<Index> pick;
  std::function<bool(Index, Index)> search = [&](Index start, Index k) -> bool {
    if (static_cast<Index>(pick.size()) == k) {
      // Solve [X_S; 1^T] lambda = [p; 1] in the least-squares sense.
      Eigen::MatrixXd A(C + 1, k);
      for (Index c = 0; c < k; ++c) {
        A.block(0, c, C, 1) = X.col(pick[static_cast<std::size_t>(c)]);
        A(C, c) = 1.0;
      }
      Eigen::VectorXd rhs(C + 1);
      rhs << p, 1.0;
      const auto qr = A.colPivHouseholderQr();
      if (qr.rank() < k) return false;
      const Eigen::VectorXd lambda = qr.solve(rhs);
      if ((A * lambda - rhs).norm() > tol * (1.0 + rhs.norm())) return false;
      return (lambda.array() >= -tol).all();
    }
    for (Index u = start; u < U; ++u) {
      pick.push_back(u);
      if (search(u + 1, k)) return true;
      pick.pop_back();
    }
    return false;
  };
  for (Index k = 1; k <= std::min(U, C + 1); ++k)
    if (search(0, k)) return true;
  return false;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved

  bool contains(const std::string& s) const { return output.find(s) != std::string::npos; }
};

/// Runs the command-line tool through the shell. `env` is prepended verbatim
/// (e.g. "CHASE_THREADS=2").
inline CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : env + " ") + "'" + std::string(CHASE_CLI_PATH) + "' " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Value of "key=<value>" in tool output, parsed as double; NaN when absent.
inline double scrape(const std::string& output, const std::string& key) {
  const auto at = output.rfind(key + "=");
  if (at == std::string::npos) return std::nan("");
  return std::stod(output.substr(at + key.size() + 1));
}

}  // namespace testing

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace trapchain {

// Interaction exponent: a finite decay exponent nu > 1 for couplings
// falling off as R^-nu, or the distinguished nearest-neighbor limit.
// The limit is a tag, never a large float, so the NNI branch is exact.
class InteractionExponent {
 public:
  static InteractionExponent finite(double nu) {
    if (!std::isfinite(nu)) {
      throw std::invalid_argument("interaction exponent: finite value required");
    }
    return InteractionExponent(nu, false);
  }

  static InteractionExponent nearest_neighbor() { return InteractionExponent(0.0, true); }

  // Accepts the literal "inf" or a decimal number.
  static InteractionExponent parse(const std::string& text) {
    if (text == "inf") return nearest_neighbor();
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("interaction exponent: cannot parse '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v)) {
      throw std::invalid_argument("interaction exponent: cannot parse '" + text + "'");
    }
    return finite(v);
  }

  bool is_nearest_neighbor() const { return nni_; }

  double value() const {
    if (nni_) throw std::logic_error("interaction exponent: no finite value in the NNI limit");
    return nu_;
  }

  // Coupling strength between nodes a distance R >= 1 apart.
  double coupling(int distance) const {
    if (nni_) return distance == 1 ? 1.0 : 0.0;
    return std::pow(static_cast<double>(distance), -nu_);
  }

  std::string str() const {
    if (nni_) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", nu_);
    return buf;
  }

  friend bool operator==(const InteractionExponent& a, const InteractionExponent& b) {
    return a.nni_ == b.nni_ && (a.nni_ || a.nu_ == b.nu_);
  }
  friend bool operator!=(const InteractionExponent& a, const InteractionExponent& b) {
    return !(a == b);
  }

 private:
  InteractionExponent(double nu, bool nni) : nu_(nu), nni_(nni) {}
  double nu_;
  bool nni_;
};

// Full description of one experiment: chain size, coupling range,
// trap strength and trap placement. Node indices are 1-based.
struct ChainConfig {
  int n_nodes = 2;
  InteractionExponent nu = InteractionExponent::nearest_neighbor();
  double gamma = 0.0;
  std::vector<int> traps;  // strictly ascending, 1-based

  void validate() const {
    if (n_nodes < 2) throw std::invalid_argument("chain config: need at least 2 nodes");
    if (!nu.is_nearest_neighbor() && !(nu.value() > 1.0)) {
      throw std::invalid_argument("chain config: finite interaction exponent must exceed 1");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw std::invalid_argument("chain config: trap strength must be finite and >= 0");
    }
    for (std::size_t i = 0; i < traps.size(); ++i) {
      if (traps[i] < 1 || traps[i] > n_nodes) {
        throw std::invalid_argument("chain config: trap index out of range");
      }
      if (i > 0 && traps[i] <= traps[i - 1]) {
        throw std::invalid_argument("chain config: trap indices must be distinct and ascending");
      }
    }
  }

  bool is_trap(int node) const {
    return std::binary_search(traps.begin(), traps.end(), node);
  }

  int trap_count() const { return static_cast<int>(traps.size()); }
  int non_trap_count() const { return n_nodes - trap_count(); }

  std::vector<int> non_trap_nodes() const {
    std::vector<int> nodes;
    nodes.reserve(non_trap_count());
    for (int j = 1; j <= n_nodes; ++j) {
      if (!is_trap(j)) nodes.push_back(j);
    }
    return nodes;
  }

  // End traps {1, N}, the layout all closed-form results assume.
  bool has_end_traps() const {
    return traps.size() == 2 && traps[0] == 1 && traps[1] == n_nodes;
  }
};

inline ChainConfig make_config(int n, InteractionExponent nu, double gamma,
                               std::vector<int> traps) {
  std::sort(traps.begin(), traps.end());
  ChainConfig cfg{n, nu, gamma, std::move(traps)};
  cfg.validate();
  return cfg;
}

}  // namespace trapchain

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dps {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simply-laced Dynkin diagram with Bourbaki numbering:
//   A_n : 1 - 2 - ... - n
//   D_n : 1 - 2 - ... - (n-2), with (n-1) and n attached to (n-2)
//   E_n : chain 1 - 3 - 4 - ... - n, with 2 attached to 4
struct Diagram {
  std::string label;
  int rank = 0;
  std::vector<std::vector<int>> adj;  // 0-based neighbour lists

  bool adjacent(int i, int j) const {
    for (int k : adj[i])
      if (k == j) return true;
    return false;
  }

  static Diagram make(const std::string& label) {
    char fam = label.empty() ? '?' : label[0];
    int n = 0;
    try {
      n = std::stoi(label.substr(1));
    } catch (...) {
      throw config_error("unknown Coxeter label: " + label);
    }
    Diagram d;
    d.label = label;
    d.rank = n;
    d.adj.assign(n, {});
    auto link = [&](int a, int b) {
      d.adj[a].push_back(b);
      d.adj[b].push_back(a);
    };
    if (fam == 'A' && n >= 1) {
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
    } else if (fam == 'D' && n >= 3) {
      for (int i = 0; i + 1 < n - 2; ++i) link(i, i + 1);
      link(n - 3, n - 2);
      link(n - 3, n - 1);
    } else if (fam == 'E' && (n == 6 || n == 7 || n == 8)) {
      link(0, 2);
      for (int i = 2; i + 1 < n; ++i) link(i, i + 1);
      link(1, 3);
    } else {
      throw config_error("unsupported Coxeter label: " + label);
    }
    for (auto& v : d.adj) std::sort(v.begin(), v.end());
    return d;
  }
};

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Order of the Weyl group of one connected simply-laced component, classified
// by its shape (path => A, one trivalent node => D/E by leg lengths).
inline std::uint64_t component_weyl_order(const Diagram& d, const std::vector<int>& nodes) {
  int n = static_cast<int>(nodes.size());
  if (n == 0) return 1;
  auto deg = [&](int v) {
    int c = 0;
    for (int u : d.adj[v])
      if (std::find(nodes.begin(), nodes.end(), u) != nodes.end()) ++c;
    return c;
  };
  int tri = -1;
  for (int v : nodes) {
    int dv = deg(v);
    if (dv > 3) throw std::logic_error("diagram degree > 3");
    if (dv == 3) {
      if (tri != -1) throw std::logic_error("diagram with two branch nodes");
      tri = v;
    }
  }
  if (tri == -1) return factorial(n + 1);  // type A_n
  std::vector<int> legs;
  for (int start : d.adj[tri]) {
    if (std::find(nodes.begin(), nodes.end(), start) == nodes.end()) continue;
    int len = 0, prev = tri, cur = start;
    while (true) {
      ++len;
      int next = -1;
      for (int u : d.adj[cur]) {
        if (u == prev) continue;
        if (std::find(nodes.begin(), nodes.end(), u) == nodes.end()) continue;
        next = u;
        break;
      }
      if (next == -1) break;
      prev = cur;
      cur = next;
    }
    legs.push_back(len);
  }
  std::sort(legs.begin(), legs.end());
  if (legs[0] == 1 && legs[1] == 1)
    return (1ull << (n - 1)) * factorial(n);  // D_n
  if (legs[0] == 1 && legs[1] == 2) {
    if (legs[2] == 2) return 51840ull;        // E6
    if (legs[2] == 3) return 2903040ull;      // E7
    if (legs[2] == 4) return 696729600ull;    // E8
  }
  throw std::logic_error("not a finite simply-laced diagram");
}

// |W_Theta| for a set of simple roots Theta (0-based indices).
inline std::uint64_t parabolic_weyl_order(const Diagram& d, const std::vector<int>& theta) {
  std::vector<char> in(d.rank, 0), seen(d.rank, 0);
  for (int v : theta) in[v] = 1;
  std::uint64_t order = 1;
  for (int v : theta) {
    if (seen[v]) continue;
    std::vector<int> comp, stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (int u : d.adj[x])
        if (in[u] && !seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
    }
    order *= component_weyl_order(d, comp);
  }
  return order;
}

}  // namespace dps

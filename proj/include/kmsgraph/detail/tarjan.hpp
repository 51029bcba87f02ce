#pragma once

#include <algorithm>
#include <stack>
#include <vector>

namespace kmsgraph::detail {

/// Iterative Tarjan over an implicit digraph on {0,..,n-1}. `has_edge(v,u)`
/// answers whether v -> u exists. Components come out sorted internally and
/// ordered by their minimal vertex.
template <class HasEdge>
std::vector<std::vector<int>> tarjan_components(int n, HasEdge&& has_edge) {
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> lowlink(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int next_index = 0;

  struct Frame {
    int v;
    int next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::stack<Frame> frames;
    frames.push({root, 0});
    index[static_cast<std::size_t>(root)] = lowlink[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!frames.empty()) {
      Frame& f = frames.top();
      const int v = f.v;
      bool descended = false;
      while (f.next < n) {
        const int u = f.next++;
        if (!has_edge(v, u)) continue;
        if (index[static_cast<std::size_t>(u)] == -1) {
          index[static_cast<std::size_t>(u)] = lowlink[static_cast<std::size_t>(u)] = next_index++;
          stack.push_back(u);
          on_stack[static_cast<std::size_t>(u)] = 1;
          frames.push({u, 0});
          descended = true;
          break;
        }
        if (on_stack[static_cast<std::size_t>(u)])
          lowlink[static_cast<std::size_t>(v)] = std::min(
              lowlink[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(u)]);
      }
      if (descended) continue;
      if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      frames.pop();
      if (!frames.empty()) {
        const int parent = frames.top().v;
        lowlink[static_cast<std::size_t>(parent)] = std::min(
            lowlink[static_cast<std::size_t>(parent)], lowlink[static_cast<std::size_t>(v)]);
      }
    }
  }

  std::sort(components.begin(), components.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return components;
}

}  // namespace kmsgraph::detail

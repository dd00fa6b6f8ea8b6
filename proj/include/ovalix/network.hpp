#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ovalix/system.hpp"

namespace ovalix {

/// One reaction step  alpha X + beta Y -> gamma X + delta Y  with rate k > 0.
struct Reaction {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
    int delta = 0;
    Rat rate = Rat(1);

    std::tuple<int, int, int, int> complexes() const { return {alpha, beta, gamma, delta}; }
    friend bool operator==(const Reaction& a, const Reaction& b) {
        return a.complexes() == b.complexes() && a.rate == b.rate;
    }
};

struct Network {
    std::vector<Reaction> reactions;
    friend bool operator==(const Network& a, const Network& b) {
        return a.reactions == b.reactions;
    }
};

class NetworkError : public std::runtime_error {
public:
    enum class Code {
        Syntax,
        EmptyNetwork,
        TrivialReaction,
        NonpositiveRate,
        DuplicateReaction,
        MissingSpecies,
    };

    NetworkError(Code code, const std::string& what, int line = 0, int col = 0)
        : std::runtime_error(fmt(code, what, line, col)), code(code), line(line), col(col) {}

    Code code;
    int line;
    int col;

private:
    static std::string fmt(Code c, const std::string& what, int line, int col) {
        std::string s;
        switch (c) {
            case Code::Syntax: s = "syntax error"; break;
            case Code::EmptyNetwork: s = "empty network"; break;
            case Code::TrivialReaction: s = "trivial reaction"; break;
            case Code::NonpositiveRate: s = "nonpositive rate"; break;
            case Code::DuplicateReaction: s = "duplicate reaction"; break;
            case Code::MissingSpecies: s = "missing species"; break;
        }
        if (line > 0) s += " at line " + std::to_string(line) + ", column " + std::to_string(col);
        if (!what.empty()) s += ": " + what;
        return s;
    }
};

/// Checks the Network invariants: at least one reaction, every rate
/// positive, no reaction with identical reactant and product complexes, no
/// repeated four-tuple, and both species appearing somewhere.
inline void validate_network(const Network& net) {
    using Code = NetworkError::Code;
    if (net.reactions.empty()) throw NetworkError(Code::EmptyNetwork, "");
    std::set<std::tuple<int, int, int, int>> seen;
    bool has_x = false, has_y = false;
    for (const auto& r : net.reactions) {
        if (r.rate <= 0) throw NetworkError(Code::NonpositiveRate, to_string(r.rate));
        if (r.alpha == r.gamma && r.beta == r.delta)
            throw NetworkError(Code::TrivialReaction, "");
        if (!seen.insert(r.complexes()).second)
            throw NetworkError(Code::DuplicateReaction, "");
        has_x |= r.alpha > 0 || r.gamma > 0;
        has_y |= r.beta > 0 || r.delta > 0;
    }
    if (!has_x) throw NetworkError(Code::MissingSpecies, "X");
    if (!has_y) throw NetworkError(Code::MissingSpecies, "Y");
}

// ---------------------------------------------------------------------------
// DSL: one reaction per line,
//   aX + bY -> cX + dY @ k
// with nonnegative integer counts (1 omitted), `0` for the empty complex and
// k a positive integer or fraction p/q. `#` starts a comment.
// ---------------------------------------------------------------------------

namespace detail {

struct LineCursor {
    std::string_view s;
    std::size_t i = 0;
    int line;

    void skip() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    [[noreturn]] void fail(const std::string& what) {
        throw NetworkError(NetworkError::Code::Syntax, what, line, static_cast<int>(i) + 1);
    }
    long uint() {
        skip();
        std::size_t start = i;
        long v = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            v = v * 10 + (s[i] - '0');
            if (v > 1000000) fail("count too large");
            ++i;
        }
        if (i == start) fail("expected integer");
        return v;
    }
    // complex := '0' | count? species ('+' count? species)*
    std::pair<int, int> complex_side() {
        skip();
        int cx = 0, cy = 0;
        bool any = false;
        while (true) {
            skip();
            if (!any && i < s.size() && s[i] == '0' &&
                (i + 1 >= s.size() || (s[i + 1] != 'X' && s[i + 1] != 'x'))) {
                ++i;
                return {0, 0};
            }
            long count = 1;
            if (i < s.size() && s[i] >= '0' && s[i] <= '9') count = uint();
            skip();
            if (i >= s.size() || (s[i] != 'X' && s[i] != 'x' && s[i] != 'Y' && s[i] != 'y'))
                fail("expected species X or Y");
            bool is_x = s[i] == 'X' || s[i] == 'x';
            ++i;
            if (count == 0) fail("zero species count");
            (is_x ? cx : cy) += static_cast<int>(count);
            any = true;
            skip();
            if (i < s.size() && s[i] == '+') {
                ++i;
                continue;
            }
            return {cx, cy};
        }
    }
};

}  // namespace detail

inline Network parse_network(std::string_view text) {
    using Code = NetworkError::Code;
    Network net;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        detail::LineCursor cur{raw, 0, line_no};
        if (cur.eof()) continue;
        Reaction r;
        std::tie(r.alpha, r.beta) = cur.complex_side();
        cur.skip();
        if (cur.i + 1 >= raw.size() || raw[cur.i] != '-' || raw[cur.i + 1] != '>')
            cur.fail("expected '->'");
        cur.i += 2;
        std::tie(r.gamma, r.delta) = cur.complex_side();
        cur.skip();
        if (cur.i >= raw.size() || raw[cur.i] != '@') cur.fail("expected '@ rate'");
        ++cur.i;
        cur.skip();
        std::size_t rate_start = cur.i;
        auto rate = parse_rat(raw.substr(rate_start));
        if (!rate) {
            cur.i = rate_start;
            cur.fail("expected rate constant");
        }
        if (*rate <= 0)
            throw NetworkError(Code::NonpositiveRate, to_string(*rate), line_no,
                               static_cast<int>(rate_start) + 1);
        r.rate = *rate;
        if (r.alpha == r.gamma && r.beta == r.delta)
            throw NetworkError(Code::TrivialReaction, "", line_no, 1);
        net.reactions.push_back(r);
    }
    validate_network(net);
    return net;
}

namespace detail {

inline std::string complex_str(int cx, int cy) {
    if (cx == 0 && cy == 0) return "0";
    std::string s;
    if (cx > 0) {
        if (cx > 1) s += std::to_string(cx);
        s += 'X';
    }
    if (cy > 0) {
        if (!s.empty()) s += " + ";
        if (cy > 1) s += std::to_string(cy);
        s += 'Y';
    }
    return s;
}

}  // namespace detail

/// Canonical printing: reactions sorted by (alpha, beta, gamma, delta).
inline std::string print_network(const Network& net) {
    auto sorted = net.reactions;
    std::sort(sorted.begin(), sorted.end(),
              [](const Reaction& a, const Reaction& b) { return a.complexes() < b.complexes(); });
    std::string out;
    for (const auto& r : sorted) {
        out += detail::complex_str(r.alpha, r.beta);
        out += " -> ";
        out += detail::complex_str(r.gamma, r.delta);
        out += " @ ";
        out += to_string(r.rate);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mass-action derivation and network measures
// ---------------------------------------------------------------------------

/// f = sum k_i (gamma_i - alpha_i) x^alpha_i y^beta_i,
/// g = sum k_i (delta_i - beta_i) x^alpha_i y^beta_i.
inline PlanarSystem derive_mass_action(const Network& net) {
    PlanarSystem sys;
    for (const auto& r : net.reactions) {
        sys.f.add_term({r.alpha, r.beta}, r.rate * (r.gamma - r.alpha));
        sys.g.add_term({r.alpha, r.beta}, r.rate * (r.delta - r.beta));
    }
    return sys;
}

/// Network order: max over reactions of alpha + beta.
inline int order(const Network& net) {
    int n = 0;
    for (const auto& r : net.reactions) n = std::max(n, r.alpha + r.beta);
    return n;
}

/// Molecularity: max over reactions of max(alpha + beta, gamma + delta).
inline int molecularity(const Network& net) {
    int n = 0;
    for (const auto& r : net.reactions)
        n = std::max(n, std::max(r.alpha + r.beta, r.gamma + r.delta));
    return n;
}

// ---------------------------------------------------------------------------
// E-graph (Euclidean embedded graph): nodes are complexes at their lattice
// coordinates, one directed edge per reaction.
// ---------------------------------------------------------------------------

struct EGraph {
    std::vector<std::pair<int, int>> nodes;            // sorted lattice points
    std::vector<std::pair<int, int>> edges;            // node indices, one per reaction
};

inline EGraph egraph(const Network& net) {
    EGraph g;
    std::set<std::pair<int, int>> points;
    for (const auto& r : net.reactions) {
        points.insert({r.alpha, r.beta});
        points.insert({r.gamma, r.delta});
    }
    g.nodes.assign(points.begin(), points.end());
    auto index_of = [&](int a, int b) {
        return static_cast<int>(std::lower_bound(g.nodes.begin(), g.nodes.end(),
                                                 std::make_pair(a, b)) -
                                g.nodes.begin());
    };
    for (const auto& r : net.reactions)
        g.edges.push_back({index_of(r.alpha, r.beta), index_of(r.gamma, r.delta)});
    return g;
}

namespace detail {

/// Tarjan strongly connected components; returns component id per node.
inline std::vector<int> scc_ids(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) adj[u].push_back(v);
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int next_index = 0, next_comp = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = next_comp;
                if (w == v) break;
            }
            ++next_comp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) strongconnect(v);
    return comp;
}

}  // namespace detail

/// A network is weakly reversible iff every E-graph edge lies on an oriented
/// cycle, equivalently both endpoints of each edge share a strongly
/// connected component.
inline bool is_weakly_reversible(const Network& net) {
    EGraph g = egraph(net);
    auto comp = detail::scc_ids(static_cast<int>(g.nodes.size()), g.edges);
    for (auto [u, v] : g.edges)
        if (comp[u] != comp[v]) return false;
    return true;
}

/// Appends, for every reaction whose exact reverse four-tuple is absent, the
/// reverse reaction with rate eps. Every edge of the result lies in a
/// 2-cycle, so the result is weakly reversible.
inline Network reversibilize(const Network& net, const Rat& eps) {
    if (eps <= 0) throw std::invalid_argument("reversibilize: eps must be positive");
    std::set<std::tuple<int, int, int, int>> present;
    for (const auto& r : net.reactions) present.insert(r.complexes());
    Network out = net;
    for (const auto& r : net.reactions) {
        Reaction rev{r.gamma, r.delta, r.alpha, r.beta, eps};
        if (!present.count(rev.complexes())) {
            present.insert(rev.complexes());
            out.reactions.push_back(rev);
        }
    }
    return out;
}

/// Multiplies both right-hand sides by p; construction metadata is dropped.
inline PlanarSystem multiply_system(const PlanarSystem& sys, const Poly2& p) {
    return {sys.f * p, sys.g * p, std::nullopt};
}

}  // namespace ovalix

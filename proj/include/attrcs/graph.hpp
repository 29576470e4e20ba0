#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attrcs/types.hpp"

namespace attrcs {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Immutable after load. Node ids are densified to 0..n-1 in first-appearance
// order; original ids live in ext_ids. Adjacency lists are sorted, symmetric,
// self-loop and multi-edge free. Numeric attributes are row-major with NaN
// for missing values; norm_lo/norm_hi hold the graph-global min/max per
// dimension used by normalize().
class AttributedGraph {
public:
    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t numeric_dims() const { return dims_; }

    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
    const std::vector<std::uint32_t>& neighbor_edge_types(NodeId v) const { return adj_etype_[v]; }
    std::size_t degree(NodeId v) const { return adj_[v].size(); }
    bool has_edge(NodeId u, NodeId v) const {
        return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    const std::vector<std::uint32_t>& tokens(NodeId v) const { return tokens_[v]; }
    double numeric_raw(NodeId v, std::size_t dim) const { return numeric_[v * dims_ + dim]; }

    // Min-max normalization to [0,1]; a constant dimension maps to 0 and a
    // missing value stays NaN so the distance layer can skip the dimension.
    double normalize(double raw, std::size_t dim) const {
        if (std::isnan(raw)) return kMissing;
        const double lo = norm_lo_[dim], hi = norm_hi_[dim];
        if (hi <= lo) return 0.0;
        return (raw - lo) / (hi - lo);
    }
    double normalized(NodeId v, std::size_t dim) const { return normalize(numeric_raw(v, dim), dim); }
    std::pair<double, double> norm_range(std::size_t dim) const {
        return {norm_lo_[dim], norm_hi_[dim]};
    }

    const std::string& ext_id(NodeId v) const { return ext_ids_[v]; }
    std::optional<NodeId> find(const std::string& ext) const {
        auto it = ext_index_.find(ext);
        if (it == ext_index_.end()) return std::nullopt;
        return it->second;
    }

    bool has_node_types() const { return !node_types_.empty(); }
    bool has_edge_types() const { return has_edge_types_; }
    std::uint32_t node_type(NodeId v) const { return node_types_[v]; }
    std::optional<std::uint32_t> node_type_id(const std::string& label) const {
        auto it = node_type_index_.find(label);
        if (it == node_type_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::uint32_t> edge_type_id(const std::string& label) const {
        auto it = edge_type_index_.find(label);
        if (it == edge_type_index_.end()) return std::nullopt;
        return it->second;
    }
    const std::string& node_type_label(std::uint32_t t) const { return node_type_labels_[t]; }
    std::size_t count_of_type(std::uint32_t t) const {
        std::size_t c = 0;
        for (auto tt : node_types_)
            if (tt == t) ++c;
        return c;
    }

    std::optional<std::uint32_t> token_id(const std::string& tok) const {
        auto it = token_index_.find(tok);
        if (it == token_index_.end()) return std::nullopt;
        return it->second;
    }
    const std::string& token_name(std::uint32_t t) const { return token_names_[t]; }

    class Builder;

private:
    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::vector<std::uint32_t>> adj_etype_;  // parallel to adj_ when edge types present
    bool has_edge_types_ = false;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<std::uint32_t>> tokens_;  // sorted interned token ids
    std::vector<double> numeric_;                     // n x dims, NaN = missing
    std::size_t dims_ = 0;
    std::vector<double> norm_lo_, norm_hi_;
    std::vector<std::string> ext_ids_;
    std::unordered_map<std::string, NodeId> ext_index_;
    std::vector<std::string> token_names_;
    std::unordered_map<std::string, std::uint32_t> token_index_;
    std::vector<std::uint32_t> node_types_;
    std::vector<std::string> node_type_labels_;
    std::unordered_map<std::string, std::uint32_t> node_type_index_;
    std::vector<std::string> edge_type_labels_;
    std::unordered_map<std::string, std::uint32_t> edge_type_index_;
};

struct LoadStats {
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
    std::size_t isolated_from_attrs = 0;  // nodes seen only in the attribute file
    std::vector<std::string> warnings;
};

class AttributedGraph::Builder {
public:
    NodeId intern_node(const std::string& ext) {
        auto it = g_.ext_index_.find(ext);
        if (it != g_.ext_index_.end()) return it->second;
        const NodeId id = static_cast<NodeId>(g_.ext_ids_.size());
        g_.ext_ids_.push_back(ext);
        g_.ext_index_.emplace(ext, id);
        edges_of_.emplace_back();
        return id;
    }

    bool has_node(const std::string& ext) const { return g_.ext_index_.count(ext) > 0; }
    std::size_t node_count() const { return g_.ext_ids_.size(); }

    // Returns false for self-loops and duplicates (they are dropped).
    bool add_edge(NodeId u, NodeId v, const std::string& edge_type = "") {
        if (u == v) {
            ++stats_.self_loops;
            return false;
        }
        auto& eu = edges_of_[u];
        if (std::find(eu.begin(), eu.end(), v) != eu.end()) {
            ++stats_.duplicate_edges;
            return false;
        }
        std::uint32_t t = 0;
        if (!edge_type.empty()) {
            has_edge_types_ = true;
            t = intern_label(edge_type, g_.edge_type_labels_, g_.edge_type_index_);
        }
        edges_of_[u].push_back(v);
        edges_of_[v].push_back(u);
        etype_of_[{std::min(u, v), std::max(u, v)}] = t;
        ++n_edges_;
        return true;
    }

    void set_tokens(NodeId v, const std::vector<std::string>& toks) {
        auto& dst = tokens_raw_;
        if (dst.size() <= v) dst.resize(v + 1);
        dst[v].clear();
        for (const auto& t : toks)
            dst[v].push_back(intern_label(t, g_.token_names_, g_.token_index_));
        std::sort(dst[v].begin(), dst[v].end());
        dst[v].erase(std::unique(dst[v].begin(), dst[v].end()), dst[v].end());
    }

    void set_numeric(NodeId v, const std::vector<double>& values) {
        if (numeric_raw_.size() <= v) numeric_raw_.resize(v + 1);
        numeric_raw_[v] = values;
    }

    void set_node_type(NodeId v, const std::string& label) {
        if (types_raw_.size() <= v) types_raw_.resize(v + 1, kNoType);
        types_raw_[v] = intern_label(label, g_.node_type_labels_, g_.node_type_index_);
    }

    LoadStats& stats() { return stats_; }

    // finalize with externally fixed normalization bounds (projection views)
    AttributedGraph finalize_with_norms(std::size_t dims, std::vector<double> lo,
                                        std::vector<double> hi) {
        AttributedGraph g = finalize(dims);
        g.norm_lo_ = std::move(lo);
        g.norm_hi_ = std::move(hi);
        return g;
    }

    AttributedGraph finalize(std::optional<std::size_t> schema_dims = std::nullopt) {
        const std::size_t n = g_.ext_ids_.size();
        // infer dimension from the first node that carries numeric values
        std::size_t dims = schema_dims.value_or(0);
        if (!schema_dims) {
            for (const auto& row : numeric_raw_)
                if (!row.empty()) {
                    dims = row.size();
                    break;
                }
        }
        g_.dims_ = dims;
        g_.numeric_.assign(n * dims, kMissing);
        for (std::size_t v = 0; v < numeric_raw_.size(); ++v) {
            const auto& row = numeric_raw_[v];
            if (row.empty()) continue;
            if (row.size() != dims)
                throw SchemaError(0, "numeric dimension mismatch for node " + g_.ext_ids_[v] +
                                         ": got " + std::to_string(row.size()) + ", schema " +
                                         std::to_string(dims));
            for (std::size_t d = 0; d < dims; ++d) g_.numeric_[v * dims + d] = row[d];
        }
        g_.norm_lo_.assign(dims, 0.0);
        g_.norm_hi_.assign(dims, 0.0);
        for (std::size_t d = 0; d < dims; ++d) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t v = 0; v < n; ++v) {
                const double x = g_.numeric_[v * dims + d];
                if (std::isnan(x)) continue;
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            if (lo > hi) lo = hi = 0.0;  // dimension entirely missing
            g_.norm_lo_[d] = lo;
            g_.norm_hi_[d] = hi;
        }

        g_.tokens_.assign(n, {});
        for (std::size_t v = 0; v < tokens_raw_.size(); ++v) g_.tokens_[v] = std::move(tokens_raw_[v]);

        g_.adj_.assign(n, {});
        g_.has_edge_types_ = has_edge_types_;
        if (has_edge_types_) g_.adj_etype_.assign(n, {});
        for (NodeId u = 0; u < n; ++u) {
            auto nb = edges_of_[u];
            std::sort(nb.begin(), nb.end());
            g_.adj_[u] = std::move(nb);
            if (has_edge_types_) {
                g_.adj_etype_[u].reserve(g_.adj_[u].size());
                for (NodeId v : g_.adj_[u])
                    g_.adj_etype_[u].push_back(etype_of_[{std::min(u, v), std::max(u, v)}]);
            }
        }
        g_.edge_count_ = n_edges_;

        if (!types_raw_.empty()) {
            types_raw_.resize(n, kNoType);
            // untyped nodes in a typed graph get a reserved "?" type
            for (auto& t : types_raw_)
                if (t == kNoType)
                    t = intern_label("?", g_.node_type_labels_, g_.node_type_index_);
            g_.node_types_ = std::move(types_raw_);
        }
        return std::move(g_);
    }

private:
    static constexpr std::uint32_t kNoType = 0xffffffffu;

    static std::uint32_t intern_label(const std::string& s, std::vector<std::string>& names,
                                      std::unordered_map<std::string, std::uint32_t>& index) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        const auto id = static_cast<std::uint32_t>(names.size());
        names.push_back(s);
        index.emplace(s, id);
        return id;
    }

    struct PairHash {
        std::size_t operator()(const std::pair<NodeId, NodeId>& p) const {
            return std::hash<std::uint64_t>()((std::uint64_t(p.first) << 32) | p.second);
        }
    };

    AttributedGraph g_;
    std::vector<std::vector<NodeId>> edges_of_;
    std::unordered_map<std::pair<NodeId, NodeId>, std::uint32_t, PairHash> etype_of_;
    std::vector<std::vector<std::uint32_t>> tokens_raw_;
    std::vector<std::vector<double>> numeric_raw_;
    std::vector<std::uint32_t> types_raw_;
    bool has_edge_types_ = false;
    std::size_t n_edges_ = 0;
    LoadStats stats_;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace detail

struct GraphBundle {
    AttributedGraph graph;
    LoadStats stats;
};

// Edge file: "u<TAB>v[<TAB>edge_type]" with '#' comments. Attribute file:
// "node<TAB>tok1,tok2,...<TAB>x1,...,xm" (token list may be empty, numeric
// fields may be NA). Optional type file: "node<TAB>type_label".
inline GraphBundle load_graph(std::istream& edge_src, std::istream* attr_src,
                              std::istream* type_src = nullptr,
                              std::optional<std::size_t> schema_dims = std::nullopt) {
    AttributedGraph::Builder b;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(edge_src, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto f = detail::split(line, '\t');
        if (f.size() < 2 || f.size() > 3 || f[0].empty() || f[1].empty())
            throw ParseError(line_no, "expected 'u<TAB>v[<TAB>edge_type]', got '" + line + "'");
        const NodeId u = b.intern_node(f[0]);
        const NodeId v = b.intern_node(f[1]);
        b.add_edge(u, v, f.size() == 3 ? f[2] : "");
    }

    std::optional<std::size_t> dims = schema_dims;
    if (attr_src) {
        line_no = 0;
        while (std::getline(*attr_src, line)) {
            ++line_no;
            line = detail::strip_cr(line);
            if (line.empty() || line[0] == '#') continue;
            const auto f = detail::split(line, '\t');
            if (f.size() != 3 || f[0].empty())
                throw ParseError(line_no,
                                 "expected 'node<TAB>tokens<TAB>numerics', got '" + line + "'");
            if (!b.has_node(f[0])) {
                ++b.stats().isolated_from_attrs;
                b.stats().warnings.push_back("attribute node '" + f[0] +
                                             "' absent from edge file; added as isolated");
            }
            const NodeId v = b.intern_node(f[0]);
            if (!f[1].empty()) b.set_tokens(v, detail::split(f[1], ','));
            if (!f[2].empty()) {
                std::vector<double> vals;
                for (const auto& cell : detail::split(f[2], ',')) {
                    if (cell == "NA") {
                        vals.push_back(kMissing);
                        continue;
                    }
                    try {
                        std::size_t used = 0;
                        vals.push_back(std::stod(cell, &used));
                        if (used != cell.size()) throw std::invalid_argument(cell);
                    } catch (const std::exception&) {
                        throw ParseError(line_no, "bad numeric value '" + cell + "'");
                    }
                }
                if (dims && vals.size() != *dims)
                    throw SchemaError(line_no, "numeric dimension mismatch: got " +
                                                   std::to_string(vals.size()) + ", schema " +
                                                   std::to_string(*dims));
                if (!dims) dims = vals.size();
                b.set_numeric(v, vals);
            }
        }
    }

    if (type_src) {
        line_no = 0;
        while (std::getline(*type_src, line)) {
            ++line_no;
            line = detail::strip_cr(line);
            if (line.empty() || line[0] == '#') continue;
            const auto f = detail::split(line, '\t');
            if (f.size() != 2 || f[0].empty() || f[1].empty())
                throw ParseError(line_no, "expected 'node<TAB>type_label', got '" + line + "'");
            if (!b.has_node(f[0])) {
                ++b.stats().isolated_from_attrs;
                b.stats().warnings.push_back("type-file node '" + f[0] +
                                             "' absent from edge file; added as isolated");
            }
            b.set_node_type(b.intern_node(f[0]), f[1]);
        }
    }

    if (b.node_count() == 0) throw ParseError(0, "graph has no nodes");
    LoadStats stats = b.stats();
    AttributedGraph g = b.finalize(dims);
    return {std::move(g), std::move(stats)};
}

}  // namespace attrcs

#pragma once

#include <pathlab/keyspace.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace pathlab {

using Value = std::vector<std::uint8_t>;

struct Node;
using NodePtr = std::unique_ptr<Node>;

// A null NodePtr is the empty-trie marker.

struct Branch {
    std::array<NodePtr, 16> children;
    std::optional<Value> value; // never populated for equal-length keys

    std::size_t child_count() const noexcept {
        std::size_t n = 0;
        for (const auto& c : children)
            n += c != nullptr;
        return n;
    }
};

struct Extension {
    NibblePath fragment;
    NodePtr child;
};

struct Leaf {
    NibblePath remainder;
    Value value;
};

struct Node {
    std::variant<Branch, Extension, Leaf> kind;
};

enum class NodeKind { null, branch, extension, leaf };

/// Per-leaf depth metrics. divergence_depth counts nibbles consumed before
/// reaching the leaf; node_count counts nodes on the root-to-leaf path
/// including both ends.
struct LeafMetrics {
    std::size_t divergence_depth = 0;
    std::size_t node_count = 0;

    friend bool operator==(const LeafMetrics&, const LeafMetrics&) = default;
};

struct NodeCounts {
    std::uint64_t branch = 0;
    std::uint64_t extension = 0;
    std::uint64_t leaf = 0;

    std::uint64_t total() const noexcept { return branch + extension + leaf; }
    NodeCounts& operator+=(const NodeCounts& o) noexcept {
        branch += o.branch;
        extension += o.extension;
        leaf += o.leaf;
        return *this;
    }
    friend bool operator==(const NodeCounts&, const NodeCounts&) = default;
};

/// Node kinds per nibble depth (nibbles consumed before reaching the node).
using LevelCensus = std::map<std::size_t, NodeCounts>;

namespace detail {

inline NodePtr make_leaf(NibblePath remainder, Value value) {
    return std::make_unique<Node>(Node{Leaf{remainder, std::move(value)}});
}

inline NodePtr make_extension(NibblePath fragment, NodePtr child) {
    return std::make_unique<Node>(Node{Extension{fragment, std::move(child)}});
}

inline NodePtr make_branch() { return std::make_unique<Node>(Node{Branch{}}); }

inline NodePtr clone(const NodePtr& node) {
    if (!node)
        return nullptr;
    return std::visit(
        [](const auto& n) -> NodePtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Branch>) {
                auto out = make_branch();
                auto& b = std::get<Branch>(out->kind);
                for (std::size_t i = 0; i < 16; ++i)
                    b.children[i] = clone(n.children[i]);
                b.value = n.value;
                return out;
            } else if constexpr (std::is_same_v<T, Extension>) {
                return make_extension(n.fragment, clone(n.child));
            } else {
                return make_leaf(n.remainder, n.value);
            }
        },
        node->kind);
}

inline bool equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b)
        return !a && !b;
    if (a->kind.index() != b->kind.index())
        return false;
    if (auto* ba = std::get_if<Branch>(&a->kind)) {
        const auto& bb = std::get<Branch>(b->kind);
        if (ba->value != bb.value)
            return false;
        for (std::size_t i = 0; i < 16; ++i)
            if (!equal(ba->children[i], bb.children[i]))
                return false;
        return true;
    }
    if (auto* ea = std::get_if<Extension>(&a->kind)) {
        const auto& eb = std::get<Extension>(b->kind);
        return ea->fragment == eb.fragment && equal(ea->child, eb.child);
    }
    const auto& la = std::get<Leaf>(a->kind);
    const auto& lb = std::get<Leaf>(b->kind);
    return la.remainder == lb.remainder && la.value == lb.value;
}

/// Splits where `path` first departs from an existing subtree after `common`
/// shared nibbles. Returns a branch, wrapped in an extension when common > 0.
inline NodePtr fork(const NibblePath& path, std::size_t common, std::uint8_t existing_nibble,
                    NodePtr existing_below, Value value) {
    auto branch = make_branch();
    auto& b = std::get<Branch>(branch->kind);
    b.children[existing_nibble] = std::move(existing_below);
    b.children[path[common]] = make_leaf(path.drop_front(common + 1), std::move(value));
    if (common == 0)
        return branch;
    return make_extension(path.slice(0, common), std::move(branch));
}

/// Returns true when the key was not previously present.
inline bool insert(NodePtr& node, const NibblePath& path, Value&& value) {
    if (!node) {
        node = make_leaf(path, std::move(value));
        return true;
    }
    if (auto* leaf = std::get_if<Leaf>(&node->kind)) {
        if (leaf->remainder == path) {
            leaf->value = std::move(value);
            return false;
        }
        const std::size_t common = longest_common_prefix(leaf->remainder, path);
        if (common == leaf->remainder.size() || common == path.size())
            throw std::logic_error("trie keys must have equal length");
        const std::uint8_t old_nibble = leaf->remainder[common];
        auto old_leaf = make_leaf(leaf->remainder.drop_front(common + 1), std::move(leaf->value));
        node = fork(path, common, old_nibble, std::move(old_leaf), std::move(value));
        return true;
    }
    if (auto* ext = std::get_if<Extension>(&node->kind)) {
        const std::size_t common = longest_common_prefix(ext->fragment, path);
        if (common == ext->fragment.size())
            return insert(ext->child, path.drop_front(common), std::move(value));
        if (common == path.size())
            throw std::logic_error("trie keys must have equal length");
        const std::uint8_t old_nibble = ext->fragment[common];
        NodePtr below = ext->fragment.size() > common + 1
                            ? make_extension(ext->fragment.drop_front(common + 1), std::move(ext->child))
                            : std::move(ext->child);
        node = fork(path, common, old_nibble, std::move(below), std::move(value));
        return true;
    }
    auto& branch = std::get<Branch>(node->kind);
    if (path.empty()) {
        const bool added = !branch.value.has_value();
        branch.value = std::move(value);
        return added;
    }
    return insert(branch.children[path[0]], path.drop_front(1), std::move(value));
}

inline NibblePath concat(const NibblePath& a, const NibblePath& b) {
    NibblePath p = a;
    p.append(b);
    return p;
}

/// Re-attaches `child` beneath a fragment, merging into leaves and extensions
/// so that extensions always point at branches.
inline NodePtr attach(const NibblePath& fragment, NodePtr child) {
    if (fragment.empty())
        return child;
    if (auto* leaf = std::get_if<Leaf>(&child->kind)) {
        leaf->remainder = concat(fragment, leaf->remainder);
        return child;
    }
    if (auto* ext = std::get_if<Extension>(&child->kind)) {
        ext->fragment = concat(fragment, ext->fragment);
        return child;
    }
    return make_extension(fragment, std::move(child));
}

/// Returns true when the key was found and removed.
inline bool erase(NodePtr& node, const NibblePath& path) {
    if (!node)
        return false;
    if (auto* leaf = std::get_if<Leaf>(&node->kind)) {
        if (leaf->remainder != path)
            return false;
        node.reset();
        return true;
    }
    if (auto* ext = std::get_if<Extension>(&node->kind)) {
        if (longest_common_prefix(ext->fragment, path) != ext->fragment.size())
            return false;
        if (!erase(ext->child, path.drop_front(ext->fragment.size())))
            return false;
        if (!ext->child) {
            node.reset();
            return true;
        }
        const NibblePath fragment = ext->fragment;
        NodePtr child = std::move(ext->child);
        node = attach(fragment, std::move(child));
        return true;
    }
    auto& branch = std::get<Branch>(node->kind);
    if (path.empty()) {
        if (!branch.value)
            return false;
        branch.value.reset();
    } else if (!erase(branch.children[path[0]], path.drop_front(1))) {
        return false;
    }

    const std::size_t children = branch.child_count();
    if (children >= 2 || (children == 1 && branch.value))
        return true;
    if (children == 0) {
        if (branch.value)
            node = make_leaf(NibblePath{}, std::move(*branch.value));
        else
            node.reset();
        return true;
    }
    std::uint8_t only = 0;
    while (!branch.children[only])
        ++only;
    NibblePath fragment;
    fragment.push_back(only);
    NodePtr child = std::move(branch.children[only]);
    node = attach(fragment, std::move(child));
    return true;
}

inline const Value* find(const NodePtr& root, const NibblePath& key) {
    const Node* node = root.get();
    NibblePath path = key;
    while (node) {
        if (auto* leaf = std::get_if<Leaf>(&node->kind))
            return leaf->remainder == path ? &leaf->value : nullptr;
        if (auto* ext = std::get_if<Extension>(&node->kind)) {
            if (longest_common_prefix(ext->fragment, path) != ext->fragment.size())
                return nullptr;
            path = path.drop_front(ext->fragment.size());
            node = ext->child.get();
            continue;
        }
        const auto& branch = std::get<Branch>(node->kind);
        if (path.empty())
            return branch.value ? &*branch.value : nullptr;
        node = branch.children[path[0]].get();
        path = path.drop_front(1);
    }
    return nullptr;
}

template <class F>
void walk_leaves(const Node& node, NibblePath& prefix, std::size_t nodes_above, F& fn) {
    const std::size_t here = nodes_above + 1;
    if (auto* leaf = std::get_if<Leaf>(&node.kind)) {
        LeafMetrics m{prefix.size(), here};
        fn(concat(prefix, leaf->remainder), leaf->value, m);
        return;
    }
    if (auto* ext = std::get_if<Extension>(&node.kind)) {
        NibblePath next = concat(prefix, ext->fragment);
        walk_leaves(*ext->child, next, here, fn);
        return;
    }
    const auto& branch = std::get<Branch>(node.kind);
    if (branch.value)
        fn(prefix, *branch.value, LeafMetrics{prefix.size(), here});
    for (std::uint8_t i = 0; i < 16; ++i) {
        if (!branch.children[i])
            continue;
        NibblePath next = prefix;
        next.push_back(i);
        walk_leaves(*branch.children[i], next, here, fn);
    }
}

inline void census(const Node& node, std::size_t depth, LevelCensus& out) {
    auto& counts = out[depth];
    if (std::holds_alternative<Leaf>(node.kind)) {
        ++counts.leaf;
    } else if (auto* ext = std::get_if<Extension>(&node.kind)) {
        ++counts.extension;
        census(*ext->child, depth + ext->fragment.size(), out);
    } else {
        ++counts.branch;
        const auto& branch = std::get<Branch>(node.kind);
        for (const auto& c : branch.children)
            if (c)
                census(*c, depth + 1, out);
    }
}

inline std::optional<std::string> check(const Node& node, std::size_t depth, std::size_t& leaves) {
    if (auto* leaf = std::get_if<Leaf>(&node.kind)) {
        ++leaves;
        if (depth + leaf->remainder.size() != key_nibbles)
            return "leaf at depth " + std::to_string(depth) + " does not complete a 40-nibble key";
        return std::nullopt;
    }
    if (auto* ext = std::get_if<Extension>(&node.kind)) {
        if (ext->fragment.empty())
            return "extension with empty fragment at depth " + std::to_string(depth);
        if (!ext->child)
            return "extension without child at depth " + std::to_string(depth);
        if (!std::holds_alternative<Branch>(ext->child->kind))
            return "extension at depth " + std::to_string(depth) + " does not point at a branch";
        return check(*ext->child, depth + ext->fragment.size(), leaves);
    }
    const auto& branch = std::get<Branch>(node.kind);
    const std::size_t children = branch.child_count();
    if (children < 2 && !(children == 1 && branch.value))
        return "degenerate branch at depth " + std::to_string(depth);
    if (branch.value)
        return "branch value slot populated at depth " + std::to_string(depth);
    for (const auto& c : branch.children) {
        if (!c)
            continue;
        if (auto err = check(*c, depth + 1, leaves))
            return err;
    }
    return std::nullopt;
}

} // namespace detail

/// Patricia trie over 40-nibble address keys. Single writer; a const Trie may
/// be read from several threads.
class Trie {
public:
    Trie() = default;
    Trie(const Trie& other) : root_(detail::clone(other.root_)), size_(other.size_) {}
    Trie& operator=(const Trie& other) {
        if (this != &other) {
            root_ = detail::clone(other.root_);
            size_ = other.size_;
        }
        return *this;
    }
    Trie(Trie&&) noexcept = default;
    Trie& operator=(Trie&&) noexcept = default;

    /// Returns true if the key was absent. Existing keys get their value replaced.
    bool insert(const Address& key, Value value = {}) {
        const bool added = detail::insert(root_, to_nibbles(key), std::move(value));
        size_ += added;
        return added;
    }

    std::optional<Value> lookup(const Address& key) const {
        if (const Value* v = detail::find(root_, to_nibbles(key)))
            return *v;
        return std::nullopt;
    }

    bool contains(const Address& key) const { return detail::find(root_, to_nibbles(key)) != nullptr; }

    /// Returns false (and leaves the trie untouched) when the key is absent.
    bool erase(const Address& key) {
        const bool removed = detail::erase(root_, to_nibbles(key));
        size_ -= removed;
        return removed;
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    const Node* root() const noexcept { return root_.get(); }

    NodeKind root_kind() const noexcept {
        if (!root_)
            return NodeKind::null;
        switch (root_->kind.index()) {
        case 0: return NodeKind::branch;
        case 1: return NodeKind::extension;
        default: return NodeKind::leaf;
        }
    }

    /// Visits every stored key in ascending order as fn(full_path, value, metrics).
    template <class F>
    void for_each_leaf(F&& fn) const {
        if (!root_)
            return;
        NibblePath prefix;
        detail::walk_leaves(*root_, prefix, 0, fn);
    }

    std::map<Address, LeafMetrics> leaf_metrics() const {
        std::map<Address, LeafMetrics> out;
        for_each_leaf([&](const NibblePath& key, const Value&, const LeafMetrics& m) {
            out.emplace_hint(out.end(), from_nibbles(key), m);
        });
        return out;
    }

    LevelCensus level_census() const {
        LevelCensus out;
        if (root_)
            detail::census(*root_, 0, out);
        return out;
    }

    std::size_t node_count() const {
        std::size_t n = 0;
        for (const auto& [depth, counts] : level_census())
            n += counts.total();
        return n;
    }

    /// Describes the first broken structural invariant, if any.
    std::optional<std::string> find_invariant_violation() const {
        if (!root_)
            return size_ == 0 ? std::nullopt
                              : std::optional<std::string>("empty root with non-zero key count");
        std::size_t leaves = 0;
        if (auto err = detail::check(*root_, 0, leaves))
            return err;
        if (leaves != size_)
            return "key count " + std::to_string(size_) + " != reachable leaves " + std::to_string(leaves);
        return std::nullopt;
    }

    friend bool operator==(const Trie& a, const Trie& b) {
        return a.size_ == b.size_ && detail::equal(a.root_, b.root_);
    }

private:
    NodePtr root_;
    std::size_t size_ = 0;
};

} // namespace pathlab

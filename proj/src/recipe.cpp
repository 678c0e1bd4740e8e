// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/recipe.hpp"

#include <cctype>
#include <cmath>
#include <optional>

namespace opmeans {

struct MeanRecipe::Node {
    enum class Type { Leaf, Deform, Compose, Adjoint };

    Type type = Type::Leaf;
    LeafKind leaf = LeafKind::Arithmetic;
    double power_r = 0.0;
    std::shared_ptr<const Node> base;                 // Deform / Adjoint; Compose outer
    std::optional<RepresentingMean> sigma;            // Deform
    std::vector<Rational> weights;                    // Compose
    std::vector<std::shared_ptr<const Node>> inner;   // Compose
};

namespace {

using Node = MeanRecipe::Node;

std::shared_ptr<const Node> make_leaf(MeanRecipe::LeafKind kind, double r = 0.0) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Leaf;
    n->leaf = kind;
    n->power_r = r;
    return n;
}

std::string node_spec(const Node& n) {
    switch (n.type) {
        case Node::Type::Leaf:
            switch (n.leaf) {
                case MeanRecipe::LeafKind::Arithmetic: return "A";
                case MeanRecipe::LeafKind::Harmonic: return "H";
                case MeanRecipe::LeafKind::Karcher: return "G";
                case MeanRecipe::LeafKind::LogEuclidean: return "LE";
                case MeanRecipe::LeafKind::Power: return "P(" + format_double(n.power_r) + ")";
            }
            break;
        case Node::Type::Deform:
            return "deform(" + node_spec(*n.base) + ", " + n.sigma->name() + ")";
        case Node::Type::Compose: {
            std::string out = "compose(" + node_spec(*n.base) + ";";
            for (std::size_t j = 0; j < n.inner.size(); ++j) {
                out += (j == 0 ? " " : ", ") + n.weights[j].str() + ":" + node_spec(*n.inner[j]);
            }
            return out + ")";
        }
        case Node::Type::Adjoint:
            return "adjoint(" + node_spec(*n.base) + ")";
    }
    throw Error("node_spec: corrupt recipe node");
}

RecipeClass node_class(const Node& n) {
    RecipeClass c;
    switch (n.type) {
        case Node::Type::Leaf:
            switch (n.leaf) {
                case MeanRecipe::LeafKind::Arithmetic:
                    c.in_M = c.in_M_plus = c.in_M0_plus = true;
                    break;
                case MeanRecipe::LeafKind::Harmonic:
                    c.in_M = c.in_M_minus = c.in_M0_minus = true;
                    break;
                case MeanRecipe::LeafKind::Karcher:
                    c.in_M = c.in_M_plus = c.in_M_minus = c.in_M0_plus = c.in_M0_minus = true;
                    break;
                case MeanRecipe::LeafKind::LogEuclidean:
                    break; // not generated from {A, H, G} by the two procedures
                case MeanRecipe::LeafKind::Power:
                    c.in_M = true;
                    if (n.power_r > 0.0) {
                        c.in_M_plus = c.in_M0_plus = true;
                    } else {
                        c.in_M_minus = c.in_M0_minus = true;
                    }
                    break;
            }
            return c;
        case Node::Type::Deform: {
            const RecipeClass base = node_class(*n.base);
            const MeanClassification sig = classify(*n.sigma);
            c.in_M = base.in_M;
            c.in_M_plus = base.in_M_plus && sig.gcv;
            c.in_M_minus = base.in_M_minus && sig.gcc;
            c.in_M0_plus = base.in_M0_plus && sig.pmi;
            c.in_M0_minus = base.in_M0_minus && sig.pmd;
            return c;
        }
        case Node::Type::Compose: {
            RecipeClass acc = node_class(*n.base);
            for (const auto& child : n.inner) {
                const RecipeClass ch = node_class(*child);
                acc.in_M = acc.in_M && ch.in_M;
                acc.in_M_plus = acc.in_M_plus && ch.in_M_plus;
                acc.in_M_minus = acc.in_M_minus && ch.in_M_minus;
            }
            acc.in_M0_plus = acc.in_M0_minus = false; // composition not allowed there
            return acc;
        }
        case Node::Type::Adjoint: {
            const RecipeClass base = node_class(*n.base);
            c.in_M = base.in_M;
            c.in_M_plus = base.in_M_minus;
            c.in_M_minus = base.in_M_plus;
            c.in_M0_plus = base.in_M0_minus;
            c.in_M0_minus = base.in_M0_plus;
            return c;
        }
    }
    throw Error("node_class: corrupt recipe node");
}

HpdMatrix eval_node(const Node& n, const DiscreteMeasure& mu, const SolverConfig& cfg) {
    switch (n.type) {
        case Node::Type::Leaf:
            switch (n.leaf) {
                case MeanRecipe::LeafKind::Arithmetic: return arithmetic_mean(mu);
                case MeanRecipe::LeafKind::Harmonic: return harmonic_mean(mu);
                case MeanRecipe::LeafKind::Karcher: return karcher_mean(mu, cfg).value;
                case MeanRecipe::LeafKind::LogEuclidean: return log_euclidean_mean(mu);
                case MeanRecipe::LeafKind::Power: return power_mean(n.power_r, mu, cfg).value;
            }
            break;
        case Node::Type::Deform: {
            const Node& base = *n.base;
            const SolverConfig inner_cfg = cfg.inner();
            MeasureMean m = [&base, inner_cfg](const DiscreteMeasure& nu) {
                return eval_node(base, nu, inner_cfg);
            };
            return deform_solve(m, *n.sigma, mu, cfg).value;
        }
        case Node::Type::Compose: {
            std::vector<HpdMatrix> values;
            values.reserve(n.inner.size());
            const SolverConfig inner_cfg = cfg.inner();
            for (const auto& child : n.inner) values.push_back(eval_node(*child, mu, inner_cfg));
            DiscreteMeasure point(std::move(values), n.weights);
            return eval_node(*n.base, point, cfg);
        }
        case Node::Type::Adjoint:
            return matrix_inv(eval_node(*n.base, pf_inverse(mu), cfg));
    }
    throw Error("eval_node: corrupt recipe node");
}

SolveResult eval_node_traced(const Node& n, const DiscreteMeasure& mu, const SolverConfig& cfg) {
    switch (n.type) {
        case Node::Type::Leaf:
            switch (n.leaf) {
                case MeanRecipe::LeafKind::Karcher: return karcher_mean(mu, cfg);
                case MeanRecipe::LeafKind::Power: return power_mean(n.power_r, mu, cfg);
                default: break;
            }
            break;
        case Node::Type::Deform: {
            const Node& base = *n.base;
            const SolverConfig inner_cfg = cfg.inner();
            MeasureMean m = [&base, inner_cfg](const DiscreteMeasure& nu) {
                return eval_node(base, nu, inner_cfg);
            };
            return deform_solve(m, *n.sigma, mu, cfg);
        }
        case Node::Type::Compose: {
            std::vector<HpdMatrix> values;
            values.reserve(n.inner.size());
            const SolverConfig inner_cfg = cfg.inner();
            for (const auto& child : n.inner) values.push_back(eval_node(*child, mu, inner_cfg));
            DiscreteMeasure point(std::move(values), n.weights);
            return eval_node_traced(*n.base, point, cfg);
        }
        case Node::Type::Adjoint: {
            SolveResult r = eval_node_traced(*n.base, pf_inverse(mu), cfg);
            return {matrix_inv(r.value), std::move(r.trace)};
        }
    }
    return {eval_node(n, mu, cfg), {}};
}

} // namespace

MeanRecipe MeanRecipe::arithmetic() { return MeanRecipe(make_leaf(LeafKind::Arithmetic)); }
MeanRecipe MeanRecipe::harmonic() { return MeanRecipe(make_leaf(LeafKind::Harmonic)); }
MeanRecipe MeanRecipe::karcher() { return MeanRecipe(make_leaf(LeafKind::Karcher)); }
MeanRecipe MeanRecipe::log_euclidean() { return MeanRecipe(make_leaf(LeafKind::LogEuclidean)); }

MeanRecipe MeanRecipe::power(double r) {
    if (!(r >= -1.0 && r <= 1.0) || r == 0.0) {
        throw RecipeInvalid("recipe power leaf: exponent must lie in [-1,1] minus 0, got " +
                            format_double(r));
    }
    return MeanRecipe(make_leaf(LeafKind::Power, r));
}

MeanRecipe MeanRecipe::deform(MeanRecipe base, RepresentingMean sigma) {
    if (sigma.is_left_trivial()) {
        throw RecipeInvalid("recipe deform: left-trivial deformation is degenerate");
    }
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Deform;
    n->base = std::move(base.node_);
    n->sigma = std::move(sigma);
    return MeanRecipe(std::move(n));
}

MeanRecipe MeanRecipe::compose(MeanRecipe outer, std::vector<Rational> weights,
                               std::vector<MeanRecipe> inner) {
    if (inner.empty()) throw RecipeInvalid("recipe compose: no inner means");
    if (weights.size() != inner.size()) {
        throw RecipeInvalid("recipe compose: " + std::to_string(weights.size()) +
                            " weights vs " + std::to_string(inner.size()) + " inner means");
    }
    Rational total(0);
    for (const auto& w : weights) {
        if (!(w > Rational(0))) throw RecipeInvalid("recipe compose: weights must be positive");
        total = total + w;
    }
    if (total != Rational(1)) {
        throw RecipeInvalid("recipe compose: weights sum to " + total.str() +
                            ", expected exactly 1");
    }
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Compose;
    n->base = std::move(outer.node_);
    n->weights = std::move(weights);
    n->inner.reserve(inner.size());
    for (auto& child : inner) n->inner.push_back(std::move(child.node_));
    return MeanRecipe(std::move(n));
}

MeanRecipe MeanRecipe::adjoint(MeanRecipe base) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Adjoint;
    n->base = std::move(base.node_);
    return MeanRecipe(std::move(n));
}

std::string MeanRecipe::spec() const { return node_spec(*node_); }

RecipeClass MeanRecipe::class_tags() const { return node_class(*node_); }

HpdMatrix eval_recipe(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                      const SolverConfig& cfg) {
    cfg.validate();
    return eval_node(*recipe.node_, mu, cfg);
}

SolveResult eval_recipe_traced(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                               const SolverConfig& cfg) {
    cfg.validate();
    return eval_node_traced(*recipe.node_, mu, cfg);
}

MeasureMean recipe_evaluator(MeanRecipe recipe, SolverConfig cfg) {
    return [recipe = std::move(recipe), cfg](const DiscreteMeasure& mu) {
        return eval_recipe(recipe, mu, cfg);
    };
}

namespace {

/// Minimal cursor for the recipe grammar (kept separate from the scalar
/// mean-spec parser, which handles the sigma sublanguage).
class RecipeCursor {
  public:
    explicit RecipeCursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    /// Raw token up to (not including) the next top-level occurrence of one
    /// of the stop characters; parentheses nest.
    std::string_view balanced_until(std::string_view stops) {
        skip_ws();
        std::size_t start = pos_;
        int depth = 0;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '(') {
                ++depth;
            } else if (c == ')') {
                if (depth == 0) break;
                --depth; // closes a nested group; not a stop character
            } else if (depth == 0 && stops.find(c) != std::string_view::npos) {
                break;
            }
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    double number() {
        const std::string_view tok = balanced_until(",;):");
        try {
            std::size_t used = 0;
            const std::string owned(tok);
            const double v = std::stod(owned, &used);
            while (used < owned.size() &&
                   std::isspace(static_cast<unsigned char>(owned[used])))
                ++used;
            if (used != owned.size()) fail("malformed number '" + owned + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("malformed number '" + std::string(tok) + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("recipe parse error at offset " + std::to_string(pos_) + " of '" +
                         std::string(text_) + "': " + what);
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

MeanRecipe parse_recipe_node(RecipeCursor& cur) {
    const std::string head = cur.ident();
    if (head == "A") return MeanRecipe::arithmetic();
    if (head == "H") return MeanRecipe::harmonic();
    if (head == "G") return MeanRecipe::karcher();
    if (head == "LE") return MeanRecipe::log_euclidean();
    if (head == "P") {
        cur.expect('(');
        const double r = cur.number();
        cur.expect(')');
        return MeanRecipe::power(r);
    }
    if (head == "deform") {
        cur.expect('(');
        MeanRecipe base = parse_recipe_node(cur);
        cur.expect(',');
        const std::string_view sigma_text = cur.balanced_until(",;)");
        RepresentingMean sigma = parse_mean_spec(sigma_text);
        cur.expect(')');
        return MeanRecipe::deform(std::move(base), std::move(sigma));
    }
    if (head == "compose") {
        cur.expect('(');
        MeanRecipe outer = parse_recipe_node(cur);
        cur.expect(';');
        std::vector<Rational> weights;
        std::vector<MeanRecipe> inner;
        for (;;) {
            const std::string_view w_text = cur.balanced_until(":");
            std::string trimmed(w_text);
            while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
                trimmed.pop_back();
            weights.push_back(Rational::parse(trimmed));
            cur.expect(':');
            inner.push_back(parse_recipe_node(cur));
            if (!cur.eat(',')) break;
        }
        cur.expect(')');
        return MeanRecipe::compose(std::move(outer), std::move(weights), std::move(inner));
    }
    if (head == "adjoint") {
        cur.expect('(');
        MeanRecipe base = parse_recipe_node(cur);
        cur.expect(')');
        return MeanRecipe::adjoint(std::move(base));
    }
    cur.fail("unknown recipe '" + head + "'");
}

} // namespace

MeanRecipe parse_recipe(std::string_view text) {
    RecipeCursor cur(text);
    MeanRecipe out = parse_recipe_node(cur);
    if (!cur.at_end()) cur.fail("trailing input after recipe");
    return out;
}

} // namespace opmeans

#include "retab/instantiate.hpp"

#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "retab/eval.hpp"
#include "retab/print.hpp"
#include "retab/simplify.hpp"

namespace retab {

namespace {

struct MatrixInfo {
    std::vector<std::pair<Int, Int>> ranges;  // per-dimension index ranges
    int base = -1;                            // first scalar var id (find matrices)
    const MatrixLit* constants = nullptr;     // constant matrices
    bool is_bool = false;

    Int flat_size() const {
        Int n = 1;
        for (auto& [lo, hi] : ranges) n *= hi - lo + 1;
        return n;
    }
};

struct Env {
    std::map<std::string, Int> scalars;       // params, constants, indices
    std::map<std::string, MatrixInfo> matrices;
    std::map<std::string, int> scalar_vars;   // find name -> var id
    Model* model = nullptr;
};

[[noreturn]] void err(const std::string& msg) { throw InstantiateError(msg); }

Expr inst(const Expr& e, Env& env);

Int eval_const(const Expr& e, Env& env) {
    Expr r = simplify(inst(e, env));
    if (r->kind != Kind::Const)
        err("expression does not reduce to a constant: " + print_prefix(r));
    return r->value;
}

// flattened scalar name for a matrix element: tour0, P1_2, s1_2_3
std::string scalar_name(const std::string& base, const std::vector<Int>& idx) {
    std::ostringstream out;
    out << base;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) out << "_";
        out << idx[i];
    }
    return out.str();
}

// expand a matrix into its scalars in row-major order
std::vector<Expr> matrix_scalars(const MatrixInfo& m, Env& env) {
    std::vector<Expr> out;
    Int total = m.flat_size();
    out.reserve(static_cast<std::size_t>(total));
    for (Int flat = 0; flat < total; ++flat) {
        if (m.constants) {
            out.push_back(mk::int_const(m.constants->values[static_cast<std::size_t>(flat)]));
        } else {
            int id = m.base + static_cast<int>(flat);
            out.push_back(mk::var(id, env.model->store[id].name, m.is_bool));
        }
    }
    return out;
}

// children of allDiff / sum may be comprehensions or whole matrices that
// expand to several expressions
void expand_into(const Expr& child, Env& env, std::vector<Expr>& out);

void unroll_gens(const std::vector<Generator>& gens, std::size_t g, Env& env,
                 const std::function<void()>& leaf) {
    if (g == gens.size()) {
        leaf();
        return;
    }
    Int lo = eval_const(gens[g].lo, env);
    Int hi = eval_const(gens[g].hi, env);
    for (Int v = lo; v <= hi; ++v) {
        auto saved = env.scalars.find(gens[g].index);
        std::optional<Int> prev;
        if (saved != env.scalars.end()) prev = saved->second;
        env.scalars[gens[g].index] = v;
        unroll_gens(gens, g + 1, env, leaf);
        if (prev)
            env.scalars[gens[g].index] = *prev;
        else
            env.scalars.erase(gens[g].index);
    }
}

void expand_into(const Expr& child, Env& env, std::vector<Expr>& out) {
    if (child->kind == Kind::Comprehension) {
        if (child->gens.empty()) {
            for (const auto& c : child->children) out.push_back(inst(c, env));
        } else {
            unroll_gens(child->gens, 0, env,
                        [&] { out.push_back(inst(child->children[0], env)); });
        }
        return;
    }
    if (child->kind == Kind::Ident) {
        auto it = env.matrices.find(child->name);
        if (it != env.matrices.end()) {
            auto scalars = matrix_scalars(it->second, env);
            out.insert(out.end(), scalars.begin(), scalars.end());
            return;
        }
    }
    out.push_back(inst(child, env));
}

Expr inst(const Expr& e, Env& env) {
    switch (e->kind) {
        case Kind::Const:
        case Kind::Var:
            return e;
        case Kind::Ident: {
            auto sc = env.scalars.find(e->name);
            if (sc != env.scalars.end()) return mk::int_const(sc->second);
            auto sv = env.scalar_vars.find(e->name);
            if (sv != env.scalar_vars.end())
                return mk::var(sv->second, e->name, env.model->store[sv->second].is_bool);
            if (env.matrices.count(e->name))
                err("matrix '" + e->name + "' used where a scalar is expected");
            err("unbound identifier '" + e->name + "'");
        }
        case Kind::MatrixAccess: {
            auto it = env.matrices.find(e->name);
            if (it == env.matrices.end())
                err("'" + e->name + "' is not a matrix");
            const MatrixInfo& m = it->second;
            if (e->children.size() != m.ranges.size())
                err("wrong number of indices for '" + e->name + "'");
            std::vector<Expr> idx;
            bool all_const = true;
            for (const auto& c : e->children) {
                Expr ic = simplify(inst(c, env));
                if (ic->kind != Kind::Const) all_const = false;
                idx.push_back(std::move(ic));
            }
            if (all_const) {
                std::vector<Int> iv;
                Int flat = 0;
                for (std::size_t d = 0; d < idx.size(); ++d) {
                    Int v = idx[d]->value;
                    auto [lo, hi] = m.ranges[d];
                    if (v < lo || v > hi)
                        err("index " + std::to_string(v) + " out of bounds for '" +
                            e->name + "'");
                    flat = flat * (hi - lo + 1) + (v - lo);
                    iv.push_back(v);
                }
                if (m.constants)
                    return mk::int_const(m.constants->values[static_cast<std::size_t>(flat)]);
                int id = m.base + static_cast<int>(flat);
                return mk::var(id, env.model->store[id].name, m.is_bool);
            }
            // single-dimensional indexing of the flattened matrix
            std::vector<Expr> children;
            std::vector<Int> coeffs;
            Int offset = 0;
            Int stride = 1;
            for (std::size_t d = idx.size(); d-- > 0;) {
                auto [lo, hi] = m.ranges[d];
                children.push_back(idx[d]);
                coeffs.push_back(stride);
                offset -= lo * stride;
                stride *= hi - lo + 1;
            }
            Expr flat_idx = mk::sum(std::move(children), std::move(coeffs), offset);
            return mk::element(matrix_scalars(m, env), std::move(flat_idx));
        }
        case Kind::ForAll:
        case Kind::Exists: {
            std::vector<Expr> parts;
            unroll_gens(e->gens, 0, env,
                        [&] { parts.push_back(inst(e->children[0], env)); });
            if (e->kind == Kind::ForAll)
                return parts.empty() ? mk::bool_const(true) : mk::and_(std::move(parts));
            return parts.empty() ? mk::bool_const(false) : mk::or_(std::move(parts));
        }
        case Kind::Comprehension:
            err("comprehension outside allDiff/sum");
        case Kind::Sum: {
            std::vector<Expr> children;
            std::vector<Int> coeffs;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                std::size_t before = children.size();
                expand_into(e->children[i], env, children);
                for (std::size_t k = before; k < children.size(); ++k)
                    coeffs.push_back(e->coeffs[i]);
            }
            return mk::sum(std::move(children), std::move(coeffs), e->offset);
        }
        case Kind::AllDiff: {
            std::vector<Expr> children;
            for (const auto& c : e->children) expand_into(c, env, children);
            return mk::all_diff(std::move(children));
        }
        default: {
            std::vector<Expr> children;
            children.reserve(e->children.size());
            for (const auto& c : e->children) children.push_back(inst(c, env));
            ExprNode n = *e;
            n.children = std::move(children);
            return std::make_shared<const ExprNode>(std::move(n));
        }
    }
}

} // namespace

Model instantiate(const ModelSource& src, const ParamBinding& params) {
    Model model;
    Env env;
    env.model = &model;

    // every given must be bound, and only givens may be bound as scalars
    for (const auto& [name, value] : params.scalars) {
        bool declared = false;
        for (const auto& p : src.params) declared |= p.name == name;
        if (!declared) err("extra parameter '" + name + "'");
        (void)value;
    }
    for (const auto& p : src.params)
        if (!params.scalars.count(p.name)) err("missing parameter '" + p.name + "'");
    // matrix lettings from the parameter file act as constants
    for (const auto& [name, m] : params.matrices) {
        MatrixInfo info;
        for (int d : m.dims) info.ranges.push_back({1, d});
        info.constants = &m;
        env.matrices[name] = info;
    }

    for (auto [kind, idx] : src.order) {
        switch (kind) {
            case StmtKind::Given: {
                const auto& p = src.params[idx];
                Int v = params.scalars.at(p.name);
                if (p.range_lo) {
                    Int lo = eval_const(p.range_lo, env);
                    Int hi = eval_const(p.range_hi, env);
                    if (v < lo || v > hi)
                        err("parameter '" + p.name + "' = " + std::to_string(v) +
                            " outside declared range " + std::to_string(lo) + ".." +
                            std::to_string(hi));
                }
                env.scalars[p.name] = v;
                break;
            }
            case StmtKind::Letting: {
                const auto& l = src.lettings[idx];
                if (l.matrix) {
                    MatrixInfo info;
                    for (int d : l.matrix->dims) info.ranges.push_back({1, d});
                    info.constants = &*l.matrix;
                    env.matrices[l.name] = info;
                } else {
                    env.scalars[l.name] = eval_const(l.value, env);
                }
                break;
            }
            case StmtKind::Find: {
                const auto& f = src.finds[idx];
                Domain dom = f.is_bool
                                 ? Domain::boolean()
                                 : Domain::range(eval_const(f.dom_lo, env),
                                                 eval_const(f.dom_hi, env));
                if (dom.empty()) err("empty domain for '" + f.name + "'");
                if (f.index_ranges.empty()) {
                    int id = model.store.add(f.name, dom, f.is_bool);
                    env.scalar_vars[f.name] = id;
                } else {
                    MatrixInfo info;
                    info.is_bool = f.is_bool;
                    for (const auto& [lo_e, hi_e] : f.index_ranges) {
                        Int lo = eval_const(lo_e, env);
                        Int hi = eval_const(hi_e, env);
                        if (lo > hi) err("empty index range for '" + f.name + "'");
                        info.ranges.push_back({lo, hi});
                    }
                    // scalars created in row-major order; ids are contiguous
                    std::vector<Int> idx_vals;
                    info.base = model.store.size();
                    std::function<void(std::size_t)> create = [&](std::size_t d) {
                        if (d == info.ranges.size()) {
                            model.store.add(scalar_name(f.name, idx_vals), dom, f.is_bool);
                            return;
                        }
                        for (Int v = info.ranges[d].first; v <= info.ranges[d].second; ++v) {
                            idx_vals.push_back(v);
                            create(d + 1);
                            idx_vals.pop_back();
                        }
                    };
                    create(0);
                    env.matrices[f.name] = info;
                }
                break;
            }
            case StmtKind::Constraint: {
                Expr c = normalize(inst(src.constraint_templates[idx], env));
                if (c->kind == Kind::And) {
                    for (const auto& part : c->children)
                        model.constraints.push_back(part);
                } else if (!(c->kind == Kind::Const && c->value != 0)) {
                    model.constraints.push_back(c);
                }
                break;
            }
            case StmtKind::Objective: {
                model.objective_sense = src.objective_sense;
                model.objective = normalize(inst(src.objective_template, env));
                break;
            }
        }
    }
    return model;
}

namespace {

// remove constant children from an allDiff, eliminating their values from
// the domains of the variable children
Expr strip_alldiff_constants(const Expr& c, Model& m, bool& changed) {
    std::vector<Int> consts;
    std::vector<Expr> rest;
    for (const auto& ch : c->children) {
        if (ch->kind == Kind::Const)
            consts.push_back(ch->value);
        else
            rest.push_back(ch);
    }
    if (consts.empty()) return c;
    for (const auto& ch : rest) {
        if (ch->kind != Kind::Var) continue;
        Domain& d = m.store[ch->var].domain;
        for (Int v : consts) {
            if (d.contains(v)) {
                d.remove(v);
                changed = true;
            }
        }
    }
    changed = true;
    if (rest.size() <= 1) return mk::bool_const(true);
    return mk::all_diff(std::move(rest));
}

} // namespace

Model filter_domains(const Model& input) {
    Model m = input;
    if (m.proven_unsat) return m;

    bool changed = true;
    while (changed) {
        changed = false;

        // newly assigned variables are substituted out and deleted
        Assignment assigned;
        for (int id = 0; id < m.store.size(); ++id) {
            Var& v = m.store[id];
            if (v.deleted) continue;
            if (v.domain.empty()) {
                m.proven_unsat = true;
                m.constraints.clear();
                return m;
            }
            if (v.domain.is_singleton()) {
                assigned[id] = v.domain.min();
                v.deleted = true;
                m.assigned_deleted.push_back({id, v.domain.min()});
            }
        }
        if (!assigned.empty()) changed = true;

        std::vector<Expr> next;
        for (const auto& c0 : m.constraints) {
            Expr c = assigned.empty() ? c0 : simplify(c0, assigned);
            if (c->kind == Kind::Const) {
                if (c->value == 0) {
                    m.proven_unsat = true;
                    m.constraints.clear();
                    return m;
                }
                changed = true;
                continue;
            }
            if (c->kind == Kind::AllDiff) {
                c = strip_alldiff_constants(c, m, changed);
                if (c->kind == Kind::Const) continue;
            }
            std::vector<int> sc = scope_of(c);
            if (sc.size() == 1) {
                // unary constraint absorbed into the domain
                int v = sc[0];
                Domain& d = m.store[v].domain;
                std::vector<Int> keep;
                std::vector<Int> vals(m.store.size(), 0);
                for (Int val : d.values()) {
                    vals[v] = val;
                    if (eval_bool(c, vals)) keep.push_back(val);
                }
                if (keep.size() != d.size()) changed = true;
                d = Domain(std::move(keep));
                if (d.empty()) {
                    m.proven_unsat = true;
                    m.constraints.clear();
                    return m;
                }
                changed = true;
                continue;
            }
            next.push_back(std::move(c));
        }
        m.constraints = std::move(next);
        if (m.objective && !assigned.empty())
            m.objective = simplify(m.objective, assigned);
    }

    for (auto& c : m.constraints) c = normalize(c);
    if (m.objective) m.objective = normalize(m.objective);
    return m;
}

} // namespace retab

#include "retab/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "retab/print.hpp"
#include "retab/simplify.hpp"

namespace retab {

namespace {

enum class Tok {
    End, Ident, IntLit,
    // keywords
    Given, Letting, Find, Such, That, Matrix, Indexed, By, Of, IntKw, BoolKw,
    ForAll, Exists, AllDiffKw, SumKw, In, True, False, Minimising, Maximising,
    // symbols
    Plus, Minus, Star, Slash, Percent, Bar,
    LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Colon, Dot, DotDot,
    Eq, Neq, Lt, Leq, Gt, Geq,
    AndOp, OrOp, Arrow, DoubleArrow, Bang,
};

struct Token {
    Tok kind;
    std::string text;
    Int value = 0;
    int line = 1, col = 1;
};

const std::map<std::string, Tok> keywords = {
    {"given", Tok::Given},       {"letting", Tok::Letting},
    {"find", Tok::Find},         {"such", Tok::Such},
    {"that", Tok::That},         {"matrix", Tok::Matrix},
    {"indexed", Tok::Indexed},   {"by", Tok::By},
    {"of", Tok::Of},             {"int", Tok::IntKw},
    {"bool", Tok::BoolKw},       {"forAll", Tok::ForAll},
    {"exists", Tok::Exists},     {"allDiff", Tok::AllDiffKw},
    {"sum", Tok::SumKw},         {"in", Tok::In},
    {"true", Tok::True},         {"false", Tok::False},
    {"minimising", Tok::Minimising}, {"minimizing", Tok::Minimising},
    {"maximising", Tok::Maximising}, {"maximizing", Tok::Maximising},
};

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') { ++line; col = 1; }
            else ++col;
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '$') {  // comment to end of line
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            t.text = text.substr(i, j - i);
            auto kw = keywords.find(t.text);
            t.kind = kw == keywords.end() ? Tok::Ident : kw->second;
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = Tok::IntLit;
            t.text = text.substr(i, j - i);
            t.value = std::stoll(t.text);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < text.size() && text[i + 1] == b;
        };
        if (two('.', '.')) { t.kind = Tok::DotDot; advance(2); }
        else if (two('!', '=')) { t.kind = Tok::Neq; advance(2); }
        else if (two('<', '=')) { t.kind = Tok::Leq; advance(2); }
        else if (two('>', '=')) { t.kind = Tok::Geq; advance(2); }
        else if (two('<', '-') && i + 2 < text.size() && text[i + 2] == '>') {
            t.kind = Tok::DoubleArrow; advance(3);
        }
        else if (two('-', '>')) { t.kind = Tok::Arrow; advance(2); }
        else if (two('/', '\\')) { t.kind = Tok::AndOp; advance(2); }
        else if (two('\\', '/')) { t.kind = Tok::OrOp; advance(2); }
        else {
            switch (c) {
                case '+': t.kind = Tok::Plus; break;
                case '-': t.kind = Tok::Minus; break;
                case '*': t.kind = Tok::Star; break;
                case '/': t.kind = Tok::Slash; break;
                case '%': t.kind = Tok::Percent; break;
                case '|': t.kind = Tok::Bar; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case '[': t.kind = Tok::LBracket; break;
                case ']': t.kind = Tok::RBracket; break;
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                case ',': t.kind = Tok::Comma; break;
                case ':': t.kind = Tok::Colon; break;
                case '.': t.kind = Tok::Dot; break;
                case '=': t.kind = Tok::Eq; break;
                case '<': t.kind = Tok::Lt; break;
                case '>': t.kind = Tok::Gt; break;
                case '!': t.kind = Tok::Bang; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'",
                                     line, col);
            }
            advance(1);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

enum class NameKind { Param, Constant, ConstantMatrix, Scalar, Matrix, BoolScalar, BoolMatrix, Index };

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    std::map<std::string, NameKind> names;
    std::vector<std::string> index_stack;
    // while parsing a comprehension element the generator indices are not
    // known yet; unresolved identifiers are checked afterwards
    int deferred = 0;

    const Token& peek(int ahead = 0) const {
        std::size_t p = pos + ahead;
        return p < toks.size() ? toks[p] : toks.back();
    }
    const Token& get() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
    bool accept(Tok k) {
        if (peek().kind == k) { get(); return true; }
        return false;
    }
    const Token& expect(Tok k, const std::string& what) {
        if (peek().kind != k)
            throw ParseError("expected " + what, peek().line, peek().col);
        return toks[pos++];
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().col);
    }

    NameKind lookup(const Token& t) const {
        for (auto it = index_stack.rbegin(); it != index_stack.rend(); ++it)
            if (*it == t.text) return NameKind::Index;
        auto it = names.find(t.text);
        if (it == names.end()) {
            if (deferred) return NameKind::Index;
            throw ParseError("unknown identifier '" + t.text + "'", t.line, t.col);
        }
        return it->second;
    }

    void check_resolved(const Expr& e, const Token& at) const {
        if (e->kind == Kind::Ident && !names.count(e->name)) {
            bool found = false;
            for (const auto& idx : index_stack)
                if (idx == e->name) found = true;
            if (!found)
                throw ParseError("unknown identifier '" + e->name + "'", at.line, at.col);
        }
        if (e->kind == Kind::MatrixAccess && !names.count(e->name))
            throw ParseError("unknown identifier '" + e->name + "'", at.line, at.col);
        for (const auto& c : e->children) check_resolved(c, at);
    }

    void declare(const Token& t, NameKind k) {
        if (names.count(t.text))
            throw ParseError("duplicate declaration of '" + t.text + "'", t.line, t.col);
        names[t.text] = k;
    }

    bool is_bool_name(NameKind k) const {
        return k == NameKind::BoolScalar || k == NameKind::BoolMatrix;
    }

    void require_bool(const Expr& e, const Token& at) const {
        if (!e->bool_typed)
            throw ParseError("type mismatch: Boolean expression expected", at.line, at.col);
    }
    void require_int(const Expr& e, const Token& at) const {
        // Boolean expressions coerce to 0/1 in integer positions
        (void)e; (void)at;
    }

    // ---- expressions ----

    Expr parse_expr() { return parse_quantified(); }

    // `i, j : int(a..b), k : int(c..d)` — names before a ':' share a range;
    // the range bounds may reference indices of earlier generators. Each
    // generator's indices are pushed onto the scope stack as parsed.
    std::vector<Generator> parse_generators() {
        std::vector<Generator> gens;
        while (true) {
            std::vector<Token> idents;
            idents.push_back(expect(Tok::Ident, "index identifier"));
            while (accept(Tok::Comma))
                idents.push_back(expect(Tok::Ident, "index identifier"));
            expect(Tok::Colon, "':'");
            expect(Tok::IntKw, "'int'");
            expect(Tok::LParen, "'('");
            Expr lo = parse_add();
            expect(Tok::DotDot, "'..'");
            Expr hi = parse_add();
            expect(Tok::RParen, "')'");
            for (auto& id : idents) {
                gens.push_back({id.text, lo, hi});
                index_stack.push_back(id.text);
            }
            if (!accept(Tok::Comma)) break;
        }
        return gens;
    }

    Expr parse_quantified() {
        if (peek().kind == Tok::ForAll || peek().kind == Tok::Exists) {
            Kind k = get().kind == Tok::ForAll ? Kind::ForAll : Kind::Exists;
            std::size_t depth = index_stack.size();
            std::vector<Generator> gens = parse_generators();
            expect(Tok::Dot, "'.'");
            Expr body = parse_quantified();
            require_bool(body, peek());
            index_stack.resize(depth);
            return mk::quantifier(k, std::move(gens), std::move(body));
        }
        return parse_iff();
    }

    Expr parse_iff() {
        Token at = peek();
        Expr e = parse_implies();
        while (peek().kind == Tok::DoubleArrow) {
            get();
            require_bool(e, at);
            Expr rhs = parse_implies();
            require_bool(rhs, at);
            e = mk::iff(std::move(e), std::move(rhs));
        }
        return e;
    }

    Expr parse_implies() {
        Token at = peek();
        Expr e = parse_or();
        if (peek().kind == Tok::Arrow) {
            get();
            require_bool(e, at);
            Expr rhs = parse_implies();  // right associative
            require_bool(rhs, at);
            return mk::implies(std::move(e), std::move(rhs));
        }
        return e;
    }

    Expr parse_or() {
        Token at = peek();
        Expr e = parse_and();
        if (peek().kind != Tok::OrOp) return e;
        std::vector<Expr> cs{e};
        while (accept(Tok::OrOp)) cs.push_back(parse_and());
        for (auto& c : cs) require_bool(c, at);
        return mk::or_(std::move(cs));
    }

    Expr parse_and() {
        Token at = peek();
        Expr e = parse_rel();
        if (peek().kind != Tok::AndOp) return e;
        std::vector<Expr> cs{e};
        while (accept(Tok::AndOp)) cs.push_back(parse_rel());
        for (auto& c : cs) require_bool(c, at);
        return mk::and_(std::move(cs));
    }

    Expr parse_rel() {
        Expr e = parse_add();
        switch (peek().kind) {
            case Tok::Eq: get(); return mk::rel(Kind::Eq, e, parse_add());
            case Tok::Neq: get(); return mk::rel(Kind::Neq, e, parse_add());
            case Tok::Lt: get(); return mk::rel(Kind::Lt, e, parse_add());
            case Tok::Leq: get(); return mk::rel(Kind::Leq, e, parse_add());
            case Tok::Gt: get(); return mk::rel(Kind::Gt, e, parse_add());
            case Tok::Geq: get(); return mk::rel(Kind::Geq, e, parse_add());
            case Tok::In: {
                get();
                return mk::in_set(e, parse_set_literal());
            }
            default: return e;
        }
    }

    std::vector<Int> parse_set_literal() {
        expect(Tok::LBrace, "'{'");
        std::vector<Int> vals;
        if (peek().kind != Tok::RBrace) {
            while (true) {
                vals.push_back(parse_int_literal());
                if (!accept(Tok::Comma)) break;
            }
        }
        expect(Tok::RBrace, "'}'");
        return vals;
    }

    Int parse_int_literal() {
        bool neg = accept(Tok::Minus);
        const Token& t = expect(Tok::IntLit, "integer literal");
        return neg ? -t.value : t.value;
    }

    Expr parse_add() {
        Expr first = parse_mul();
        if (peek().kind != Tok::Plus && peek().kind != Tok::Minus) return first;
        std::vector<Expr> children{first};
        std::vector<Int> coeffs{1};
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            bool minus = get().kind == Tok::Minus;
            children.push_back(parse_mul());
            coeffs.push_back(minus ? -1 : 1);
        }
        return mk::sum(std::move(children), std::move(coeffs), 0);
    }

    Expr parse_mul() {
        Expr e = parse_unary();
        while (true) {
            if (peek().kind == Tok::Star) {
                get();
                Expr rhs = parse_unary();
                if (e->kind == Kind::Product) {
                    std::vector<Expr> cs = e->children;
                    cs.push_back(std::move(rhs));
                    e = mk::product(std::move(cs));
                } else {
                    e = mk::product({std::move(e), std::move(rhs)});
                }
            } else if (peek().kind == Tok::Slash) {
                get();
                e = mk::div(std::move(e), parse_unary());
            } else if (peek().kind == Tok::Percent) {
                get();
                e = mk::mod(std::move(e), parse_unary());
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (accept(Tok::Minus)) return mk::neg(parse_unary());
        if (peek().kind == Tok::Bang) {
            Token at = get();
            Expr e = parse_unary();
            require_bool(e, at);
            return mk::not_(e);
        }
        return parse_atom();
    }

    Expr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::IntLit:
                get();
                return mk::int_const(t.value);
            case Tok::True:
                get();
                return mk::bool_const(true);
            case Tok::False:
                get();
                return mk::bool_const(false);
            case Tok::LParen: {
                get();
                Expr e = parse_expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Bar: {
                get();
                Expr e = parse_add();
                expect(Tok::Bar, "closing '|'");
                return mk::abs(std::move(e));
            }
            case Tok::AllDiffKw: {
                get();
                expect(Tok::LParen, "'('");
                Expr arg = parse_collection_arg();
                expect(Tok::RParen, "')'");
                return mk::all_diff({std::move(arg)});
            }
            case Tok::SumKw: {
                get();
                expect(Tok::LParen, "'('");
                Expr arg = parse_collection_arg();
                expect(Tok::RParen, "')'");
                return mk::sum({std::move(arg)}, {1}, 0);
            }
            case Tok::Ident: {
                Token id = get();
                NameKind nk = lookup(id);
                if (peek().kind == Tok::LBracket) {
                    if (nk != NameKind::Matrix && nk != NameKind::BoolMatrix &&
                        nk != NameKind::ConstantMatrix)
                        throw ParseError("'" + id.text + "' is not a matrix", id.line, id.col);
                    get();
                    std::vector<Expr> idx;
                    while (true) {
                        idx.push_back(parse_add());
                        if (!accept(Tok::Comma)) break;
                    }
                    expect(Tok::RBracket, "']'");
                    Expr e = mk::matrix_access(id.text, std::move(idx));
                    if (nk == NameKind::BoolMatrix) {
                        ExprNode n = *e;
                        n.bool_typed = true;
                        return std::make_shared<const ExprNode>(std::move(n));
                    }
                    return e;
                }
                Expr e = mk::ident(id.text);
                if (is_bool_name(nk)) {
                    ExprNode n = *e;
                    n.bool_typed = true;
                    return std::make_shared<const ExprNode>(std::move(n));
                }
                return e;
            }
            default:
                fail("unexpected token in expression");
        }
    }

    // argument of allDiff(...) / sum(...): a whole matrix by name, a list
    // literal of expressions, or a comprehension
    Expr parse_collection_arg() {
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::RParen) {
            Token id = get();
            NameKind nk = lookup(id);
            if (nk != NameKind::Matrix && nk != NameKind::BoolMatrix)
                throw ParseError("'" + id.text + "' is not a matrix of variables",
                                 id.line, id.col);
            Expr e = mk::ident(id.text);
            ExprNode n = *e;
            n.bool_typed = nk == NameKind::BoolMatrix;
            return std::make_shared<const ExprNode>(std::move(n));
        }
        Token open = expect(Tok::LBracket, "'['");
        // generator indices are not in scope yet while the element template
        // is parsed; resolution is checked once they are known
        ++deferred;
        Expr first = parse_expr();
        --deferred;
        if (accept(Tok::Bar)) {
            std::size_t depth = index_stack.size();
            std::vector<Generator> gens = parse_generators();
            expect(Tok::RBracket, "']'");
            check_resolved(first, open);
            index_stack.resize(depth);
            return mk::comprehension(std::move(gens), std::move(first));
        }
        check_resolved(first, open);
        std::vector<Expr> elems{first};
        while (accept(Tok::Comma)) {
            Token at = peek();
            Expr e = parse_expr();
            check_resolved(e, at);
            elems.push_back(std::move(e));
        }
        expect(Tok::RBracket, "']'");
        // a plain list is a comprehension with no generators
        ExprNode n{Kind::Comprehension};
        n.children = std::move(elems);
        return std::make_shared<const ExprNode>(std::move(n));
    }

    // ---- statements ----

    std::pair<Expr, Expr> parse_int_range() {
        expect(Tok::IntKw, "'int'");
        expect(Tok::LParen, "'('");
        Expr lo = parse_add();
        expect(Tok::DotDot, "'..'");
        Expr hi = parse_add();
        expect(Tok::RParen, "')'");
        return {lo, hi};
    }

    MatrixLit parse_matrix_literal() {
        // up to three nesting levels of integer lists
        MatrixLit m;
        expect(Tok::LBracket, "'['");
        if (peek().kind == Tok::LBracket) {
            std::vector<MatrixLit> rows;
            while (true) {
                rows.push_back(parse_matrix_literal());
                if (!accept(Tok::Comma)) break;
            }
            expect(Tok::RBracket, "']'");
            for (const auto& r : rows)
                if (r.dims != rows[0].dims)
                    fail("ragged matrix literal");
            m.dims.push_back(static_cast<int>(rows.size()));
            for (int d : rows[0].dims) m.dims.push_back(d);
            for (const auto& r : rows)
                m.values.insert(m.values.end(), r.values.begin(), r.values.end());
            return m;
        }
        std::vector<Int> vals;
        if (peek().kind != Tok::RBracket) {
            while (true) {
                vals.push_back(parse_int_literal());
                if (!accept(Tok::Comma)) break;
            }
        }
        expect(Tok::RBracket, "']'");
        m.dims = {static_cast<int>(vals.size())};
        m.values = std::move(vals);
        return m;
    }

    ModelSource parse_model_file() {
        ModelSource src;
        while (peek().kind != Tok::End) {
            switch (peek().kind) {
                case Tok::Given: {
                    get();
                    std::vector<Token> ids;
                    ids.push_back(expect(Tok::Ident, "parameter name"));
                    while (accept(Tok::Comma))
                        ids.push_back(expect(Tok::Ident, "parameter name"));
                    expect(Tok::Colon, "':'");
                    expect(Tok::IntKw, "'int'");
                    Expr lo, hi;
                    if (accept(Tok::LParen)) {
                        lo = parse_add();
                        expect(Tok::DotDot, "'..'");
                        hi = parse_add();
                        expect(Tok::RParen, "')'");
                    }
                    for (auto& id : ids) {
                        declare(id, NameKind::Param);
                        src.params.push_back({id.text, lo, hi});
                        src.order.push_back({StmtKind::Given,
                                             static_cast<int>(src.params.size()) - 1});
                    }
                    break;
                }
                case Tok::Letting: {
                    get();
                    Token id = expect(Tok::Ident, "constant name");
                    expect(Tok::Eq, "'='");
                    LettingDecl decl;
                    decl.name = id.text;
                    if (peek().kind == Tok::LBracket) {
                        decl.matrix = parse_matrix_literal();
                        declare(id, NameKind::ConstantMatrix);
                    } else {
                        decl.value = parse_add();
                        declare(id, NameKind::Constant);
                    }
                    src.lettings.push_back(std::move(decl));
                    src.order.push_back({StmtKind::Letting,
                                         static_cast<int>(src.lettings.size()) - 1});
                    break;
                }
                case Tok::Find: {
                    get();
                    std::vector<Token> ids;
                    ids.push_back(expect(Tok::Ident, "variable name"));
                    while (accept(Tok::Comma))
                        ids.push_back(expect(Tok::Ident, "variable name"));
                    expect(Tok::Colon, "':'");
                    FindDecl decl;
                    if (accept(Tok::Matrix)) {
                        expect(Tok::Indexed, "'indexed'");
                        expect(Tok::By, "'by'");
                        expect(Tok::LBracket, "'['");
                        while (true) {
                            decl.index_ranges.push_back(parse_int_range());
                            if (!accept(Tok::Comma)) break;
                        }
                        if (decl.index_ranges.size() > 3)
                            fail("matrices are limited to 3 dimensions");
                        expect(Tok::RBracket, "']'");
                        expect(Tok::Of, "'of'");
                    }
                    if (accept(Tok::BoolKw)) {
                        decl.is_bool = true;
                    } else {
                        auto [lo, hi] = parse_int_range();
                        decl.dom_lo = lo;
                        decl.dom_hi = hi;
                    }
                    for (auto& id : ids) {
                        NameKind nk = decl.index_ranges.empty()
                                          ? (decl.is_bool ? NameKind::BoolScalar : NameKind::Scalar)
                                          : (decl.is_bool ? NameKind::BoolMatrix : NameKind::Matrix);
                        declare(id, nk);
                        FindDecl d = decl;
                        d.name = id.text;
                        src.finds.push_back(std::move(d));
                        src.order.push_back({StmtKind::Find,
                                             static_cast<int>(src.finds.size()) - 1});
                    }
                    break;
                }
                case Tok::Such: {
                    get();
                    expect(Tok::That, "'that'");
                    while (true) {
                        Token at = peek();
                        Expr c = parse_expr();
                        require_bool(c, at);
                        src.constraint_templates.push_back(std::move(c));
                        src.order.push_back(
                            {StmtKind::Constraint,
                             static_cast<int>(src.constraint_templates.size()) - 1});
                        if (!accept(Tok::Comma)) break;
                    }
                    break;
                }
                case Tok::Minimising:
                case Tok::Maximising: {
                    bool min = get().kind == Tok::Minimising;
                    if (src.objective_sense != Objective::None)
                        fail("duplicate objective");
                    src.objective_sense = min ? Objective::Minimize : Objective::Maximize;
                    src.objective_template = parse_add();
                    src.order.push_back({StmtKind::Objective, 0});
                    break;
                }
                default:
                    fail("expected a statement");
            }
        }
        return src;
    }

    ParamBinding parse_param_file() {
        ParamBinding binding;
        while (peek().kind != Tok::End) {
            expect(Tok::Letting, "'letting'");
            Token id = expect(Tok::Ident, "parameter name");
            expect(Tok::Eq, "'='");
            if (binding.scalars.count(id.text) || binding.matrices.count(id.text))
                throw ParseError("duplicate binding for '" + id.text + "'", id.line, id.col);
            if (peek().kind == Tok::LBracket) {
                binding.matrices[id.text] = parse_matrix_literal();
            } else {
                // constant arithmetic allowed, free identifiers are not
                Token at = peek();
                Expr e = parse_add();
                Expr v = const_fold(e);
                if (v->kind != Kind::Const)
                    throw ParseError("parameter value must be constant", at.line, at.col);
                binding.scalars[id.text] = v->value;
            }
        }
        return binding;
    }

    static Expr const_fold(const Expr& e);
};

Expr Parser::const_fold(const Expr& e) {
    if (e->kind == Kind::Ident || e->kind == Kind::MatrixAccess)
        return e;  // stays non-const; caller rejects
    std::vector<Expr> cs;
    cs.reserve(e->children.size());
    for (const auto& c : e->children) cs.push_back(const_fold(c));
    ExprNode n = *e;
    n.children = std::move(cs);
    Expr rebuilt = std::make_shared<const ExprNode>(std::move(n));
    return simplify(rebuilt);
}

} // namespace

ModelSource parse_model(const std::string& text) {
    Parser p;
    p.toks = lex(text);
    // params in a model may be referenced before... no: declaration before use
    return p.parse_model_file();
}

ParamBinding parse_params(const std::string& text) {
    Parser p;
    p.toks = lex(text);
    return p.parse_param_file();
}

namespace {

void print_find(std::ostream& out, const FindDecl& f) {
    out << "find " << f.name << " : ";
    if (!f.index_ranges.empty()) {
        out << "matrix indexed by [";
        for (std::size_t i = 0; i < f.index_ranges.size(); ++i) {
            if (i) out << ", ";
            out << "int(" << print_infix(f.index_ranges[i].first) << ".."
                << print_infix(f.index_ranges[i].second) << ")";
        }
        out << "] of ";
    }
    if (f.is_bool)
        out << "bool";
    else
        out << "int(" << print_infix(f.dom_lo) << ".." << print_infix(f.dom_hi) << ")";
    out << "\n";
}

void print_matrix_lit(std::ostream& out, const MatrixLit& m, int dim, std::size_t& pos) {
    out << "[";
    if (dim + 1 == static_cast<int>(m.dims.size())) {
        for (int i = 0; i < m.dims[dim]; ++i) {
            if (i) out << ", ";
            out << m.values[pos++];
        }
    } else {
        for (int i = 0; i < m.dims[dim]; ++i) {
            if (i) out << ", ";
            print_matrix_lit(out, m, dim + 1, pos);
        }
    }
    out << "]";
}

} // namespace

std::string print_model(const ModelSource& src) {
    std::ostringstream out;
    bool constraint_open = false;
    for (auto [kind, idx] : src.order) {
        if (constraint_open && kind != StmtKind::Constraint) {
            out << "\n";
            constraint_open = false;
        }
        switch (kind) {
            case StmtKind::Given: {
                const auto& p = src.params[idx];
                out << "given " << p.name << " : int";
                if (p.range_lo)
                    out << "(" << print_infix(p.range_lo) << ".."
                        << print_infix(p.range_hi) << ")";
                out << "\n";
                break;
            }
            case StmtKind::Letting: {
                const auto& l = src.lettings[idx];
                out << "letting " << l.name << " = ";
                if (l.matrix) {
                    std::size_t pos = 0;
                    print_matrix_lit(out, *l.matrix, 0, pos);
                } else {
                    out << print_infix(l.value);
                }
                out << "\n";
                break;
            }
            case StmtKind::Find:
                print_find(out, src.finds[idx]);
                break;
            case StmtKind::Constraint:
                if (!constraint_open) {
                    out << "such that\n";
                    constraint_open = true;
                } else {
                    out << ",\n";
                }
                out << print_infix(src.constraint_templates[idx]);
                break;
            case StmtKind::Objective:
                out << (src.objective_sense == Objective::Minimize ? "minimising "
                                                                   : "maximising ")
                    << print_infix(src.objective_template) << "\n";
                break;
        }
    }
    if (constraint_open) out << "\n";
    return out.str();
}

bool model_source_equal(const ModelSource& a, const ModelSource& b) {
    auto expr_eq = [](const Expr& x, const Expr& y) {
        if (!x && !y) return true;
        if (!x || !y) return false;
        return structurally_equal(x, y);
    };
    if (a.params.size() != b.params.size() || a.lettings.size() != b.lettings.size() ||
        a.finds.size() != b.finds.size() ||
        a.constraint_templates.size() != b.constraint_templates.size())
        return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].name != b.params[i].name) return false;
        if (!expr_eq(a.params[i].range_lo, b.params[i].range_lo)) return false;
        if (!expr_eq(a.params[i].range_hi, b.params[i].range_hi)) return false;
    }
    for (std::size_t i = 0; i < a.lettings.size(); ++i) {
        if (a.lettings[i].name != b.lettings[i].name) return false;
        if (a.lettings[i].matrix != b.lettings[i].matrix) return false;
        if (!expr_eq(a.lettings[i].value, b.lettings[i].value)) return false;
    }
    for (std::size_t i = 0; i < a.finds.size(); ++i) {
        const auto& x = a.finds[i];
        const auto& y = b.finds[i];
        if (x.name != y.name || x.is_bool != y.is_bool ||
            x.index_ranges.size() != y.index_ranges.size())
            return false;
        for (std::size_t j = 0; j < x.index_ranges.size(); ++j) {
            if (!expr_eq(x.index_ranges[j].first, y.index_ranges[j].first)) return false;
            if (!expr_eq(x.index_ranges[j].second, y.index_ranges[j].second)) return false;
        }
        if (!expr_eq(x.dom_lo, y.dom_lo) || !expr_eq(x.dom_hi, y.dom_hi)) return false;
    }
    for (std::size_t i = 0; i < a.constraint_templates.size(); ++i)
        if (!expr_eq(a.constraint_templates[i], b.constraint_templates[i])) return false;
    if (a.objective_sense != b.objective_sense) return false;
    if (!expr_eq(a.objective_template, b.objective_template)) return false;
    return true;
}

} // namespace retab

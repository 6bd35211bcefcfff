#include "parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

namespace marol {

namespace {

enum class Tok {
    Ident, Int, Float, String,
    LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Comma, Colon, Semi, Dot, Pipe, Arrow,
    Assign, Eq, Ne, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    long long int_value = 0;
    double float_value = 0.0;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            SourcePos pos{line_, col_};
            if (eof()) {
                out.push_back({Tok::End, "", 0, 0.0, pos});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    id += take();
                out.push_back({Tok::Ident, id, 0, 0.0, pos});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(number(pos));
            } else if (c == '"') {
                take();
                std::string s;
                while (!eof() && peek() != '"') s += take();
                if (eof()) throw ParseError(pos, "unterminated string literal");
                take();
                out.push_back({Tok::String, s, 0, 0.0, pos});
            } else {
                out.push_back(symbol(pos));
            }
        }
    }

private:
    bool eof() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    char take() {
        char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }

    Token number(SourcePos pos) {
        std::string text;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += take();
        bool is_float = false;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_float = true;
            text += take();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += take();
        }
        if (peek() == 'e' || peek() == 'E') {
            char nxt = peek(1);
            if (std::isdigit(static_cast<unsigned char>(nxt)) ||
                ((nxt == '+' || nxt == '-') && std::isdigit(static_cast<unsigned char>(peek(2))))) {
                is_float = true;
                text += take();
                if (peek() == '+' || peek() == '-') text += take();
                while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += take();
            }
        }
        Token t{is_float ? Tok::Float : Tok::Int, text, 0, 0.0, pos};
        if (is_float)
            t.float_value = std::strtod(text.c_str(), nullptr);
        else
            t.int_value = std::strtoll(text.c_str(), nullptr, 10);
        return t;
    }

    Token symbol(SourcePos pos) {
        char c = take();
        auto two = [&](char second, Tok yes, Tok no) {
            if (peek() == second) {
                take();
                return yes;
            }
            return no;
        };
        switch (c) {
            case '{': return {Tok::LBrace, "{", 0, 0.0, pos};
            case '}': return {Tok::RBrace, "}", 0, 0.0, pos};
            case '(': return {Tok::LParen, "(", 0, 0.0, pos};
            case ')': return {Tok::RParen, ")", 0, 0.0, pos};
            case '[': return {Tok::LBracket, "[", 0, 0.0, pos};
            case ']': return {Tok::RBracket, "]", 0, 0.0, pos};
            case ',': return {Tok::Comma, ",", 0, 0.0, pos};
            case ':': return {Tok::Colon, ":", 0, 0.0, pos};
            case ';': return {Tok::Semi, ";", 0, 0.0, pos};
            case '.': return {Tok::Dot, ".", 0, 0.0, pos};
            case '|': return {Tok::Pipe, "|", 0, 0.0, pos};
            case '+': return {Tok::Plus, "+", 0, 0.0, pos};
            case '*': return {Tok::Star, "*", 0, 0.0, pos};
            case '/': return {Tok::Slash, "/", 0, 0.0, pos};
            case '-':
                if (peek() == '>') {
                    take();
                    return {Tok::Arrow, "->", 0, 0.0, pos};
                }
                return {Tok::Minus, "-", 0, 0.0, pos};
            case '=': return {two('=', Tok::Eq, Tok::Assign), "=", 0, 0.0, pos};
            case '!':
                if (peek() == '=') {
                    take();
                    return {Tok::Ne, "!=", 0, 0.0, pos};
                }
                throw ParseError(pos, "unexpected character '!'");
            case '<': return {two('=', Tok::Le, Tok::Lt), "<", 0, 0.0, pos};
            case '>': return {two('=', Tok::Ge, Tok::Gt), ">", 0, 0.0, pos};
            default:
                throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
    }

    const std::string& src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

const std::set<std::string>& library_functions() {
    static const std::set<std::string> fns = {
        "push", "concat", "contains", "combinations", "map", "fold",
        "edges", "edges_between", "all_paths", "steiner_trees",
        "qubits", "gate_type",
        "horizontal_neighbors", "vertical_neighbors", "to_2d", "value_swap",
    };
    return fns;
}

class Parser {
public:
    explicit Parser(const std::string& src) : source_(src), tokens_(Lexer(src).run()) {}

    ExprPtr run_expression() {
        ExprPtr e = parse_expr();
        if (!at(Tok::End)) throw ParseError(cur().pos, "trailing input after expression");
        return e;
    }

    MarolProgram run() {
        MarolProgram p;
        p.source = source_;
        bool saw_route = false, saw_trans = false, saw_arch = false, saw_state = false;
        while (!at(Tok::End)) {
            SourcePos pos = cur().pos;
            std::string header = expect_ident("block header");
            expect(Tok::Colon, "':' after block header");
            if (header == "RouteInfo") {
                if (saw_route) throw ParseError(pos, "duplicate RouteInfo block");
                saw_route = true;
                parse_route_info(p, pos);
            } else if (header == "TransitionInfo") {
                if (saw_trans) throw ParseError(pos, "duplicate TransitionInfo block");
                saw_trans = true;
                parse_transition_info(p, pos);
            } else if (header == "ArchInfo") {
                if (saw_arch) throw ParseError(pos, "duplicate ArchInfo block");
                saw_arch = true;
                parse_arch_info(p);
            } else if (header == "StateInfo") {
                if (saw_state) throw ParseError(pos, "duplicate StateInfo block");
                saw_state = true;
                parse_state_info(p, pos);
            } else {
                throw ParseError(pos, "unknown block '" + header + "'");
            }
        }
        if (!saw_route) throw ParseError({1, 1}, "missing mandatory block RouteInfo");
        if (!saw_trans) throw ParseError({1, 1}, "missing mandatory block TransitionInfo");
        return p;
    }

private:
    const Token& cur() const { return tokens_[i_]; }
    const Token& ahead(std::size_t k) const {
        return tokens_[std::min(i_ + k, tokens_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_ident(const char* name) const { return at(Tok::Ident) && cur().text == name; }
    Token take() { return tokens_[i_++]; }
    void expect(Tok k, const char* what) {
        if (!at(k)) throw ParseError(cur().pos, std::string("expected ") + what);
        ++i_;
    }
    std::string expect_ident(const char* what) {
        if (!at(Tok::Ident)) throw ParseError(cur().pos, std::string("expected ") + what);
        return take().text;
    }
    void skip_semi() {
        while (at(Tok::Semi)) ++i_;
    }
    bool at_block_end() const {
        // A block ends at EOF or immediately before any `<Header>:` line;
        // expressions and definitions never contain a bare colon.
        if (at(Tok::End)) return true;
        return at(Tok::Ident) && ahead(1).kind == Tok::Colon;
    }

    void parse_route_info(MarolProgram& p, SourcePos pos) {
        bool saw_decl = false, saw_gates = false, saw_realize = false;
        while (!at_block_end()) {
            skip_semi();
            if (at_block_end()) break;
            SourcePos dpos = cur().pos;
            std::string kw = expect_ident("RouteInfo definition");
            if (kw == "GateRealization") {
                saw_decl = true;
                p.realization_decl = parse_struct_decl("GateRealization", dpos);
            } else if (kw == "routed_gates") {
                saw_gates = true;
                expect(Tok::Assign, "'=' after routed_gates");
                expect(Tok::LBracket, "'['");
                while (!at(Tok::RBracket)) {
                    std::string g = expect_ident("gate name");
                    std::transform(g.begin(), g.end(), g.begin(), [](unsigned char c) {
                        return static_cast<char>(std::tolower(c));
                    });
                    p.routed_gates.push_back(g);
                    if (at(Tok::Comma)) ++i_;
                }
                expect(Tok::RBracket, "']'");
            } else if (kw == "realize_gate") {
                saw_realize = true;
                expect(Tok::Assign, "'=' after realize_gate");
                p.realize_gate = parse_expr();
            } else {
                throw ParseError(dpos, "unexpected definition '" + kw + "' in RouteInfo");
            }
            skip_semi();
        }
        if (!saw_decl) throw ParseError(pos, "RouteInfo: missing GateRealization declaration");
        if (!saw_gates) throw ParseError(pos, "RouteInfo: missing routed_gates definition");
        if (!saw_realize) throw ParseError(pos, "RouteInfo: missing realize_gate definition");
    }

    void parse_transition_info(MarolProgram& p, SourcePos pos) {
        bool saw_decl = false, saw_get = false, saw_apply = false, saw_cost = false;
        while (!at_block_end()) {
            skip_semi();
            if (at_block_end()) break;
            SourcePos dpos = cur().pos;
            std::string kw = expect_ident("TransitionInfo definition");
            if (kw == "Transition") {
                saw_decl = true;
                p.transition_decl = parse_struct_decl("Transition", dpos);
            } else if (kw == "get_transitions") {
                saw_get = true;
                expect(Tok::Assign, "'='");
                p.get_transitions = parse_expr();
            } else if (kw == "apply") {
                saw_apply = true;
                expect(Tok::Assign, "'='");
                p.apply = parse_expr();
            } else if (kw == "cost") {
                saw_cost = true;
                expect(Tok::Assign, "'='");
                p.cost = parse_expr();
            } else {
                throw ParseError(dpos, "unexpected definition '" + kw + "' in TransitionInfo");
            }
            skip_semi();
        }
        if (!saw_decl) throw ParseError(pos, "TransitionInfo: missing Transition declaration");
        if (!saw_get) throw ParseError(pos, "TransitionInfo: missing get_transitions definition");
        if (!saw_apply) throw ParseError(pos, "TransitionInfo: missing apply definition");
        if (!saw_cost) throw ParseError(pos, "TransitionInfo: missing cost definition");
    }

    void parse_arch_info(MarolProgram& p) {
        p.has_arch_info = true;
        p.arch_decl.name = "Arch";
        while (!at_block_end()) {
            skip_semi();
            if (at_block_end()) break;
            SourcePos dpos = cur().pos;
            std::string kw = expect_ident("ArchInfo definition");
            if (kw == "Arch") {
                p.arch_decl = parse_struct_decl("Arch", dpos);
            } else if (kw == "get_locations") {
                expect(Tok::Assign, "'='");
                p.get_locations = parse_expr();
            } else {
                throw ParseError(dpos, "unexpected definition '" + kw + "' in ArchInfo");
            }
            skip_semi();
        }
    }

    void parse_state_info(MarolProgram& p, SourcePos pos) {
        bool saw_cost = false;
        while (!at_block_end()) {
            skip_semi();
            if (at_block_end()) break;
            SourcePos dpos = cur().pos;
            std::string kw = expect_ident("StateInfo definition");
            if (kw == "cost") {
                saw_cost = true;
                expect(Tok::Assign, "'='");
                p.state_cost = parse_expr();
            } else {
                throw ParseError(dpos, "unexpected definition '" + kw + "' in StateInfo");
            }
            skip_semi();
        }
        if (!saw_cost) throw ParseError(pos, "StateInfo: missing cost definition");
    }

    StructDecl parse_struct_decl(const std::string& name, SourcePos pos) {
        StructDecl d;
        d.name = name;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            std::string field = expect_ident("field name");
            expect(Tok::Colon, "':' after field name");
            Type t = parse_type();
            if (d.field_type(field))
                throw ParseError(pos, name + ": duplicate field '" + field + "'");
            d.fields.emplace_back(field, std::move(t));
            if (at(Tok::Comma)) ++i_;
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Type parse_type() {
        Type t = parse_type_atom();
        if (at(Tok::Arrow)) {
            ++i_;
            Type result = parse_type();
            return Type::fun({std::move(t)}, std::move(result));
        }
        return t;
    }

    Type parse_type_atom() {
        SourcePos pos = cur().pos;
        if (at(Tok::LParen)) {
            ++i_;
            Type a = parse_type();
            expect(Tok::Comma, "',' in pair type");
            Type b = parse_type();
            expect(Tok::RParen, "')'");
            return Type::pair(std::move(a), std::move(b));
        }
        std::string name = expect_ident("type");
        if (name == "Loc") return Type::loc();
        if (name == "Int") return Type::integer();
        if (name == "Float") return Type::real();
        if (name == "Bool") return Type::boolean();
        if (name == "Qubit") return Type::qubit();
        if (name == "String") return Type::string();
        if (name == "List") {
            expect(Tok::LBracket, "'[' after List");
            Type elem = parse_type();
            expect(Tok::RBracket, "']'");
            return Type::list(std::move(elem));
        }
        if (name == "GateRealization" || name == "Transition")
            return Type::strct(name);
        throw ParseError(pos, "unknown type '" + name + "'");
    }

    // --- expressions ---

    ExprPtr parse_expr() { return parse_if(); }

    ExprPtr parse_if() {
        if (at_ident("if")) {
            SourcePos pos = take().pos;
            auto e = std::make_unique<Expr>(ExprKind::If, pos);
            e->children.push_back(parse_comparison());
            if (!at_ident("then")) throw ParseError(cur().pos, "expected 'then'");
            ++i_;
            e->children.push_back(parse_comparison());
            if (!at_ident("else")) throw ParseError(cur().pos, "expected 'else'");
            ++i_;
            e->children.push_back(parse_if());
            return e;
        }
        if (at(Tok::Pipe)) return parse_lambda();
        return parse_comparison();
    }

    ExprPtr parse_lambda() {
        SourcePos pos = cur().pos;
        expect(Tok::Pipe, "'|'");
        auto e = std::make_unique<Expr>(ExprKind::Lambda, pos);
        while (!at(Tok::Pipe)) {
            e->params.push_back(expect_ident("lambda parameter"));
            if (at(Tok::Comma)) ++i_;
        }
        expect(Tok::Pipe, "'|'");
        expect(Tok::Arrow, "'->' after lambda parameters");
        e->children.push_back(parse_if());
        return e;
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        while (at(Tok::Eq) || at(Tok::Ne) || at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) ||
               at(Tok::Ge)) {
            Token t = take();
            auto e = std::make_unique<Expr>(ExprKind::BinOp, t.pos);
            switch (t.kind) {
                case Tok::Eq: e->op = BinOpKind::Eq; break;
                case Tok::Ne: e->op = BinOpKind::Ne; break;
                case Tok::Lt: e->op = BinOpKind::Lt; break;
                case Tok::Le: e->op = BinOpKind::Le; break;
                case Tok::Gt: e->op = BinOpKind::Gt; break;
                default: e->op = BinOpKind::Ge; break;
            }
            e->children.push_back(std::move(lhs));
            e->children.push_back(parse_additive());
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token t = take();
            auto e = std::make_unique<Expr>(ExprKind::BinOp, t.pos);
            e->op = t.kind == Tok::Plus ? BinOpKind::Add : BinOpKind::Sub;
            e->children.push_back(std::move(lhs));
            e->children.push_back(parse_multiplicative());
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_postfix();
        while (at(Tok::Star) || at(Tok::Slash)) {
            Token t = take();
            auto e = std::make_unique<Expr>(ExprKind::BinOp, t.pos);
            e->op = t.kind == Tok::Star ? BinOpKind::Mul : BinOpKind::Div;
            e->children.push_back(std::move(lhs));
            e->children.push_back(parse_postfix());
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (true) {
            if (at(Tok::Dot)) {
                SourcePos pos = take().pos;
                if (at(Tok::LParen)) {
                    ++i_;
                    if (!at(Tok::Int)) throw ParseError(cur().pos, "expected projection index");
                    auto proj = std::make_unique<Expr>(ExprKind::Proj, pos);
                    proj->int_value = take().int_value;
                    expect(Tok::RParen, "')'");
                    proj->children.push_back(std::move(e));
                    e = std::move(proj);
                } else {
                    std::string field = expect_ident("field name");
                    if (at(Tok::LParen) && library_functions().count(field)) {
                        // method-call sugar: recv.f(args) == f(recv, args...)
                        auto call = std::make_unique<Expr>(ExprKind::LibCall, pos);
                        call->name = field;
                        call->children.push_back(std::move(e));
                        parse_args(call->children);
                        e = std::move(call);
                    } else {
                        auto acc = std::make_unique<Expr>(ExprKind::Field, pos);
                        acc->name = field;
                        acc->children.push_back(std::move(e));
                        e = std::move(acc);
                    }
                }
            } else if (at(Tok::LBracket)) {
                SourcePos pos = cur().pos;
                ++i_;
                auto idx = std::make_unique<Expr>(ExprKind::Index, pos);
                idx->children.push_back(std::move(e));
                idx->children.push_back(parse_expr());
                expect(Tok::RBracket, "']'");
                e = std::move(idx);
            } else if (at(Tok::LParen) && e->kind == ExprKind::Var) {
                // free-standing call: library function or closure application
                SourcePos pos = cur().pos;
                if (library_functions().count(e->name)) {
                    auto call = std::make_unique<Expr>(ExprKind::LibCall, pos);
                    call->name = e->name;
                    parse_args(call->children);
                    e = std::move(call);
                } else if (e->name == "loc") {
                    auto cast = std::make_unique<Expr>(ExprKind::LocCast, pos);
                    parse_args(cast->children);
                    if (cast->children.size() != 1)
                        throw ParseError(pos, "loc() takes one argument");
                    e = std::move(cast);
                } else {
                    auto app = std::make_unique<Expr>(ExprKind::App, pos);
                    app->children.push_back(std::move(e));
                    parse_args(app->children);
                    e = std::move(app);
                }
            } else if (at(Tok::LParen) && (e->kind == ExprKind::Lambda || e->kind == ExprKind::App)) {
                auto app = std::make_unique<Expr>(ExprKind::App, cur().pos);
                app->children.push_back(std::move(e));
                parse_args(app->children);
                e = std::move(app);
            } else {
                return e;
            }
        }
    }

    void parse_args(std::vector<ExprPtr>& into) {
        expect(Tok::LParen, "'('");
        while (!at(Tok::RParen)) {
            into.push_back(parse_expr());
            if (at(Tok::Comma))
                ++i_;
            else
                break;
        }
        expect(Tok::RParen, "')'");
    }

    ExprPtr parse_primary() {
        SourcePos pos = cur().pos;
        switch (cur().kind) {
            case Tok::Int: {
                auto e = std::make_unique<Expr>(ExprKind::IntLit, pos);
                e->int_value = take().int_value;
                return e;
            }
            case Tok::Float: {
                auto e = std::make_unique<Expr>(ExprKind::FloatLit, pos);
                e->float_value = take().float_value;
                return e;
            }
            case Tok::String: {
                auto e = std::make_unique<Expr>(ExprKind::StringLit, pos);
                e->name = take().text;
                return e;
            }
            case Tok::LBracket: {
                ++i_;
                auto e = std::make_unique<Expr>(ExprKind::ListLit, pos);
                while (!at(Tok::RBracket)) {
                    e->children.push_back(parse_expr());
                    if (at(Tok::Comma)) ++i_;
                }
                expect(Tok::RBracket, "']'");
                return e;
            }
            case Tok::LParen: {
                ++i_;
                ExprPtr first = parse_expr();
                if (at(Tok::Comma)) {
                    ++i_;
                    auto e = std::make_unique<Expr>(ExprKind::PairLit, pos);
                    e->children.push_back(std::move(first));
                    e->children.push_back(parse_expr());
                    expect(Tok::RParen, "')'");
                    return e;
                }
                expect(Tok::RParen, "')'");
                return first;
            }
            case Tok::Pipe: return parse_lambda();
            case Tok::Ident: {
                std::string name = take().text;
                if (name == "IdTrans") return std::make_unique<Expr>(ExprKind::IdTransLit, pos);
                if (name == "if") {
                    --i_;
                    return parse_if();
                }
                if (at(Tok::LBrace) &&
                    (name == "GateRealization" || name == "Transition")) {
                    ++i_;
                    auto e = std::make_unique<Expr>(ExprKind::StructLit, pos);
                    e->name = name;
                    while (!at(Tok::RBrace)) {
                        e->field_names.push_back(expect_ident("field name"));
                        expect(Tok::Assign, "'=' in struct literal");
                        e->children.push_back(parse_expr());
                        if (at(Tok::Comma)) ++i_;
                    }
                    expect(Tok::RBrace, "'}'");
                    return e;
                }
                auto e = std::make_unique<Expr>(ExprKind::Var, pos);
                e->name = name;
                return e;
            }
            default:
                throw ParseError(pos, "unexpected token '" + cur().text + "' in expression");
        }
    }

    const std::string& source_;
    std::vector<Token> tokens_;
    std::size_t i_ = 0;
};

} // namespace

MarolProgram parse_program(const std::string& source) {
    return Parser(source).run();
}

ExprPtr parse_expression(const std::string& source) {
    return Parser(source).run_expression();
}

}  // namespace marol

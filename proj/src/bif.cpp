#include "ilscsl/bif.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

namespace {

// Words cover identifiers, state labels, and numbers alike; whether a word
// is a valid number is decided where one is expected.
bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
           c == '+' || c == '<' || c == '>' || c == '/' || c == '=' || c == ':' || c == '%';
}

struct Token {
    enum Kind { Word, Punct, End } kind = End;
    std::string text;
    int line = 0;
    int col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) return t;
        const char c = text_[pos_];
        if (c == '"') {
            advance();
            t.kind = Token::Word;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\n') throw ParseError("unterminated string", t.line, t.col);
                t.text += text_[pos_];
                advance();
            }
            if (pos_ >= text_.size()) throw ParseError("unterminated string", t.line, t.col);
            advance();
            return t;
        }
        if (word_char(c)) {
            t.kind = Token::Word;
            while (pos_ < text_.size() && word_char(text_[pos_])) {
                t.text += text_[pos_];
                advance();
            }
            return t;
        }
        t.kind = Token::Punct;
        t.text = std::string(1, c);
        advance();
        return t;
    }

    // Raw skip past the next ';', for property lines whose payload follows
    // no grammar.
    void skip_statement() {
        while (pos_ < text_.size() && text_[pos_] != ';') advance();
        if (pos_ < text_.size()) advance();
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                advance();
            if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            return;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct VariableDecl {
    std::string name;
    std::vector<std::string> states;
    int line = 0;
};

struct ProbabilityDecl {
    std::string child;
    std::vector<std::string> parents;  // declared order
    bool has_table = false;
    std::vector<double> table;
    // Per-row entries: parent state labels in declared order, then values.
    std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;
    int line = 0;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) { bump(); }

    BifFile parse() {
        expect_word("network");
        network_name_ = expect_any_word("network name");
        expect_punct("{");
        skip_block_body();

        while (cur_.kind != Token::End) {
            if (cur_.kind != Token::Word)
                throw ParseError("expected a declaration", cur_.line, cur_.col);
            if (cur_.text == "variable")
                parse_variable();
            else if (cur_.text == "probability")
                parse_probability();
            else
                throw ParseError("unknown declaration '" + cur_.text + "'", cur_.line,
                                 cur_.col);
        }
        return build();
    }

private:
    void bump() { cur_ = lex_.next(); }

    void expect_word(const std::string& w) {
        if (cur_.kind != Token::Word || cur_.text != w)
            throw ParseError("expected '" + w + "'", cur_.line, cur_.col);
        bump();
    }

    std::string expect_any_word(const std::string& what) {
        if (cur_.kind != Token::Word)
            throw ParseError("expected " + what, cur_.line, cur_.col);
        std::string t = cur_.text;
        bump();
        return t;
    }

    void expect_punct(const std::string& p) {
        if (cur_.kind != Token::Punct || cur_.text != p)
            throw ParseError("expected '" + p + "'", cur_.line, cur_.col);
        bump();
    }

    bool at_punct(const std::string& p) const {
        return cur_.kind == Token::Punct && cur_.text == p;
    }

    double expect_number() {
        if (cur_.kind != Token::Word)
            throw ParseError("expected a probability", cur_.line, cur_.col);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cur_.text, &used);
        } catch (const std::exception&) {
            throw ParseError("expected a probability, got '" + cur_.text + "'", cur_.line,
                             cur_.col);
        }
        if (used != cur_.text.size())
            throw ParseError("expected a probability, got '" + cur_.text + "'", cur_.line,
                             cur_.col);
        bump();
        return v;
    }

    // Values separated by commas or whitespace, ended by ';'.
    std::vector<double> number_list_to_semicolon() {
        std::vector<double> out;
        while (!at_punct(";")) {
            if (at_punct(",")) {
                bump();
                continue;
            }
            out.push_back(expect_number());
        }
        bump();
        return out;
    }

    // The body of the network block: property lines only, all skipped.
    void skip_block_body() {
        while (!at_punct("}")) {
            if (cur_.kind == Token::End)
                throw ParseError("unterminated block", cur_.line, cur_.col);
            warnings_.push_back("line " + std::to_string(cur_.line) +
                                ": ignored network property");
            lex_.skip_statement();
            bump();
        }
        bump();
    }

    void parse_variable() {
        const int line = cur_.line;
        bump();
        VariableDecl v;
        v.name = expect_any_word("variable name");
        v.line = line;
        expect_punct("{");
        bool typed = false;
        while (!at_punct("}")) {
            if (cur_.kind == Token::End)
                throw ParseError("unterminated variable block", cur_.line, cur_.col);
            if (cur_.kind == Token::Word && cur_.text == "type") {
                bump();
                expect_word("discrete");
                expect_punct("[");
                const int declared = static_cast<int>(expect_number());
                expect_punct("]");
                expect_punct("{");
                while (!at_punct("}")) {
                    if (at_punct(",")) {
                        bump();
                        continue;
                    }
                    v.states.push_back(expect_any_word("state label"));
                }
                bump();
                expect_punct(";");
                if (declared != static_cast<int>(v.states.size()))
                    throw ParseError("variable '" + v.name + "' declares " +
                                         std::to_string(declared) + " states but lists " +
                                         std::to_string(v.states.size()),
                                     line);
                typed = true;
            } else if (cur_.kind == Token::Word && cur_.text == "property") {
                warnings_.push_back("line " + std::to_string(cur_.line) +
                                    ": ignored property of variable " + v.name);
                lex_.skip_statement();
                bump();
            } else {
                throw ParseError("unexpected token '" + cur_.text + "' in variable block",
                                 cur_.line, cur_.col);
            }
        }
        bump();
        if (!typed) throw ParseError("variable '" + v.name + "' has no type", line);
        if (v.states.size() < 2)
            throw ParseError("variable '" + v.name + "' needs at least two states", line);
        std::set<std::string> uniq(v.states.begin(), v.states.end());
        if (uniq.size() != v.states.size())
            throw ParseError("variable '" + v.name + "' repeats a state label", line);
        if (names_.count(v.name))
            throw ParseError("variable '" + v.name + "' declared twice", line);
        names_.insert(v.name);
        variables_.push_back(std::move(v));
    }

    void parse_probability() {
        const int line = cur_.line;
        bump();
        ProbabilityDecl p;
        p.line = line;
        expect_punct("(");
        p.child = expect_any_word("variable name");
        if (at_punct("|")) {
            bump();
            for (;;) {
                p.parents.push_back(expect_any_word("parent name"));
                if (at_punct(",")) {
                    bump();
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        expect_punct("{");
        while (!at_punct("}")) {
            if (cur_.kind == Token::End)
                throw ParseError("unterminated probability block", cur_.line, cur_.col);
            if (cur_.kind == Token::Word && cur_.text == "table") {
                bump();
                if (!p.parents.empty())
                    throw ParseError(
                        "conditional distribution for '" + p.child +
                            "' must list one parenthesized row per parent configuration",
                        cur_.line);
                p.has_table = true;
                p.table = number_list_to_semicolon();
            } else if (cur_.kind == Token::Word && cur_.text == "property") {
                warnings_.push_back("line " + std::to_string(cur_.line) +
                                    ": ignored property of probability " + p.child);
                lex_.skip_statement();
                bump();
            } else if (at_punct("(")) {
                const int row_line = cur_.line;
                bump();
                std::vector<std::string> states;
                while (!at_punct(")")) {
                    if (at_punct(",")) {
                        bump();
                        continue;
                    }
                    states.push_back(expect_any_word("state label"));
                }
                bump();
                if (states.size() != p.parents.size())
                    throw ParseError("row lists " + std::to_string(states.size()) +
                                         " states for " + std::to_string(p.parents.size()) +
                                         " parents",
                                     row_line);
                p.rows.emplace_back(std::move(states), number_list_to_semicolon());
            } else {
                throw ParseError("unexpected token '" + cur_.text + "' in probability block",
                                 cur_.line, cur_.col);
            }
        }
        bump();
        if (p.parents.empty() && !p.has_table)
            throw ParseError("distribution for '" + p.child + "' has no table", line);
        probabilities_.push_back(std::move(p));
    }

    BifFile build() {
        const int n = static_cast<int>(variables_.size());
        if (n == 0) throw ParseError("no variables declared", 1);

        std::map<std::string, int> index;
        std::vector<int> cards(n);
        std::vector<std::vector<std::string>> labels(n);
        std::vector<std::string> var_names(n);
        for (int i = 0; i < n; ++i) {
            index[variables_[i].name] = i;
            cards[i] = static_cast<int>(variables_[i].states.size());
            labels[i] = variables_[i].states;
            var_names[i] = variables_[i].name;
        }

        std::vector<Edge> edges;
        std::vector<const ProbabilityDecl*> decl_of(n, nullptr);
        for (const auto& p : probabilities_) {
            auto it = index.find(p.child);
            if (it == index.end())
                throw ParseError("distribution for undeclared variable '" + p.child + "'",
                                 p.line);
            const int child = it->second;
            if (decl_of[child])
                throw ParseError("variable '" + p.child + "' has two distributions", p.line);
            decl_of[child] = &p;
            for (const auto& parent : p.parents) {
                auto pit = index.find(parent);
                if (pit == index.end())
                    throw ParseError("undeclared parent '" + parent + "'", p.line);
                edges.push_back({pit->second, child});
            }
        }
        for (int i = 0; i < n; ++i)
            if (!decl_of[i])
                throw ParseError("variable '" + var_names[i] + "' has no distribution",
                                 variables_[i].line);

        Dag dag = Dag::from_edges(n, edges);

        std::vector<Cpt> cpts(n);
        for (int child = 0; child < n; ++child)
            cpts[child] = build_cpt(child, *decl_of[child], index, cards, labels);

        GroundTruthNetwork net(std::move(dag), std::move(cards), std::move(cpts),
                               std::move(var_names), std::move(labels));
        return {std::move(net), network_name_, std::move(warnings_)};
    }

    Cpt build_cpt(int child, const ProbabilityDecl& p, const std::map<std::string, int>& index,
                  const std::vector<int>& cards,
                  const std::vector<std::vector<std::string>>& labels) {
        const int r = cards[child];
        // Declared parent ids and, per declared slot, its weight in the
        // sorted-ascending mixed-radix configuration index.
        std::vector<int> declared;
        for (const auto& name : p.parents) declared.push_back(index.at(name));
        std::vector<int> sorted = declared;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ParseError("variable '" + p.child + "' repeats a parent", p.line);

        std::int64_t q = 1;
        std::vector<std::int64_t> stride(sorted.size());
        for (int a = static_cast<int>(sorted.size()) - 1; a >= 0; --a) {
            stride[a] = q;
            q *= cards[sorted[a]];
            if (q > (std::int64_t{1} << 22))
                throw CapacityError("distribution for '" + p.child +
                                    "' has too many parent configurations");
        }
        std::vector<std::int64_t> declared_weight(declared.size());
        for (std::size_t t = 0; t < declared.size(); ++t) {
            const auto at = std::lower_bound(sorted.begin(), sorted.end(), declared[t]);
            declared_weight[t] = stride[at - sorted.begin()];
        }

        Cpt cpt;
        cpt.probs.assign(static_cast<std::size_t>(q) * r, -1.0);
        std::vector<bool> seen(q, false);

        auto put_row = [&](std::int64_t config, const std::vector<double>& vals, int line) {
            if (static_cast<int>(vals.size()) != r)
                throw ParseError("row for '" + p.child + "' lists " +
                                     std::to_string(vals.size()) + " values, needs " +
                                     std::to_string(r),
                                 line);
            if (seen[config])
                throw ParseError("duplicate parent configuration for '" + p.child + "'", line);
            seen[config] = true;
            double sum = 0.0;
            for (double v : vals) {
                if (v < 0.0 || v > 1.0)
                    throw ParseError("probability outside [0,1] for '" + p.child + "'", line);
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw ParseError("probabilities for '" + p.child + "' sum to " +
                                     std::to_string(sum),
                                 line);
            for (int k = 0; k < r; ++k)
                cpt.probs[static_cast<std::size_t>(config) * r + k] = vals[k] / sum;
        };

        if (p.has_table) {
            put_row(0, p.table, p.line);
        } else {
            for (const auto& [states, vals] : p.rows) {
                std::int64_t config = 0;
                for (std::size_t t = 0; t < states.size(); ++t) {
                    const auto& parent_labels = labels[declared[t]];
                    const auto lit =
                        std::find(parent_labels.begin(), parent_labels.end(), states[t]);
                    if (lit == parent_labels.end())
                        throw ParseError("unknown state '" + states[t] + "' of parent '" +
                                             p.parents[t] + "'",
                                         p.line);
                    config += (lit - parent_labels.begin()) * declared_weight[t];
                }
                put_row(config, vals, p.line);
            }
        }

        for (std::int64_t j = 0; j < q; ++j)
            if (!seen[j])
                throw ParseError("distribution for '" + p.child + "' covers " +
                                     std::to_string(std::count(seen.begin(), seen.end(), true)) +
                                     " of " + std::to_string(q) + " parent configurations",
                                 p.line);
        return cpt;
    }

    Lexer lex_;
    Token cur_;
    std::string network_name_;
    std::set<std::string> names_;
    std::vector<VariableDecl> variables_;
    std::vector<ProbabilityDecl> probabilities_;
    std::vector<std::string> warnings_;
};

std::string format_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

BifFile load_bif(const std::string& text) { return Parser(text).parse(); }

BifFile load_bif_file(const std::string& path) { return load_bif(read_file(path)); }

std::string to_bif(const GroundTruthNetwork& net, const std::string& network_name) {
    std::string out;
    out += "network " + network_name + " {\n}\n";
    for (int i = 0; i < net.n(); ++i) {
        out += "variable " + net.names()[i] + " {\n";
        out += "  type discrete [ " + std::to_string(net.card(i)) + " ] { ";
        const auto& labels = net.state_labels()[i];
        for (std::size_t s = 0; s < labels.size(); ++s)
            out += (s ? ", " : "") + labels[s];
        out += " };\n}\n";
    }
    for (int child = 0; child < net.n(); ++child) {
        const auto parents = net.dag().parents(child);
        out += "probability ( " + net.names()[child];
        for (std::size_t t = 0; t < parents.size(); ++t)
            out += (t ? ", " : " | ") + net.names()[parents[t]];
        out += " ) {\n";

        const int r = net.card(child);
        std::int64_t q = 1;
        for (int p : parents) q *= net.card(p);
        for (std::int64_t j = 0; j < q; ++j) {
            if (parents.empty()) {
                out += "  table ";
            } else {
                out += "  (";
                std::int64_t rest = j;
                std::vector<int> state(parents.size());
                for (int t = static_cast<int>(parents.size()) - 1; t >= 0; --t) {
                    state[t] = static_cast<int>(rest % net.card(parents[t]));
                    rest /= net.card(parents[t]);
                }
                for (std::size_t t = 0; t < parents.size(); ++t)
                    out += (t ? ", " : "") + net.state_labels()[parents[t]][state[t]];
                out += ") ";
            }
            for (int k = 0; k < r; ++k)
                out += (k ? ", " : "") + format_prob(net.row_prob(child, j, k));
            out += ";\n";
        }
        out += "}\n";
    }
    return out;
}

}  // namespace ilscsl

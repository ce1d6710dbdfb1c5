#include "wigner/dsl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace wigner {

namespace {

struct Token {
    enum Kind { Word, Number, Punct, Newline, End } kind;
    std::string text;
    double value = 0.0;
    int line = 1;
    int column = 1;
};

const std::map<std::string, std::string>& label_aliases() {
    static const std::map<std::string, std::string> aliases = {
        {"↑", "u"},          // up arrow
        {"↓", "d"},          // down arrow
        {"ō", "ob"},        // o with combining macron
        {"f̄", "fb"},        // f with combining macron
        {"o̅", "ob"},        // o with combining overline
        {"f̅", "fb"},
    };
    return aliases;
}

bool is_word_char(unsigned char c) {
    if (c >= 0x80) return true;  // UTF-8 continuation/lead bytes belong to labels
    return std::isalnum(c) || c == '_' || c == '.';
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\n') {
                out.push_back({Token::Newline, "\n", 0.0, line_, column_});
                ++pos_;
                ++line_;
                column_ = 1;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
                ++column_;
                continue;
            }
            int line = line_, column = column_;
            if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                        src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' ||
                        ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
                         (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
                    ++pos_;
                    ++column_;
                }
                std::string text = src_.substr(start, pos_ - start);
                char* end = nullptr;
                double value = std::strtod(text.c_str(), &end);
                if (end != text.c_str() + text.size()) {
                    throw ParseError(line, column, "malformed number '" + text + "'");
                }
                out.push_back({Token::Number, text, value, line, column});
                continue;
            }
            if (is_word_char(static_cast<unsigned char>(c))) {
                size_t start = pos_;
                while (pos_ < src_.size() && is_word_char(static_cast<unsigned char>(src_[pos_]))) {
                    ++pos_;
                    ++column_;
                }
                std::string text = src_.substr(start, pos_ - start);
                auto alias = label_aliases().find(text);
                if (alias != label_aliases().end()) text = alias->second;
                out.push_back({Token::Word, text, 0.0, line, column});
                continue;
            }
            if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                out.push_back({Token::Punct, "->", 0.0, line, column});
                pos_ += 2;
                column_ += 2;
                continue;
            }
            static const std::string punct = "|>,=;{}()/*+-";
            if (punct.find(c) != std::string::npos) {
                out.push_back({Token::Punct, std::string(1, c), 0.0, line, column});
                ++pos_;
                ++column_;
                continue;
            }
            throw ParseError(line, column, std::string("unexpected character '") + c + "'");
        }
        out.push_back({Token::End, "", 0.0, line_, column_});
        return out;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

struct KetTerm {
    double coefficient = 1.0;
    std::vector<std::string> labels;
};

class Parser {
public:
    Parser(const std::string& source, std::string name)
        : tokens_(Lexer(source).run()), name_(std::move(name)) {}

    Scenario parse() {
        while (!at_end()) {
            if (peek().kind == Token::Newline) {
                advance();
                continue;
            }
            statement();
        }
        finish();
        try {
            scenario_.validate();
        } catch (const Error& e) {
            const Token& tok = tokens_.back();
            throw ParseError(tok.line, tok.column, e.what());
        }
        return std::move(scenario_);
    }

private:
    std::vector<Token> tokens_;
    size_t idx_ = 0;
    std::string name_;

    Scenario scenario_;
    std::vector<Subsystem> subsystems_;
    bool registry_built_ = false;
    std::vector<std::pair<double, std::vector<std::string>>> init_terms_;
    int step_counter_ = 0;
    std::map<std::string, std::string> last_measure_by_agent_;

    bool at_end() const { return tokens_[idx_].kind == Token::End; }
    const Token& peek() const { return tokens_[idx_]; }
    const Token& advance() { return tokens_[idx_ == tokens_.size() - 1 ? idx_ : idx_++]; }

    [[noreturn]] void fail(const Token& tok, const std::string& message) const {
        throw ParseError(tok.line, tok.column, message);
    }

    const Token& expect_word(const std::string& what) {
        const Token& tok = advance();
        if (tok.kind != Token::Word) fail(tok, "expected " + what);
        return tok;
    }

    void expect_punct(const std::string& text) {
        const Token& tok = advance();
        if (tok.kind != Token::Punct || tok.text != text) {
            fail(tok, "expected '" + text + "'");
        }
    }

    void expect_keyword(const std::string& text) {
        const Token& tok = advance();
        if (tok.kind != Token::Word || tok.text != text) {
            fail(tok, "expected '" + text + "'");
        }
    }

    bool accept_punct(const std::string& text) {
        if (peek().kind == Token::Punct && peek().text == text) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_word(const std::string& text) {
        if (peek().kind == Token::Word && peek().text == text) {
            advance();
            return true;
        }
        return false;
    }

    void end_statement() {
        const Token& tok = advance();
        if (tok.kind != Token::Newline && tok.kind != Token::End) {
            fail(tok, "unexpected trailing input '" + tok.text + "'");
        }
    }

    std::string next_step_id() { return "s" + std::to_string(++step_counter_); }

    void ensure_registry(const Token& at) {
        if (registry_built_) return;
        if (subsystems_.empty()) fail(at, "no systems declared yet");
        scenario_.registry = std::make_shared<SpaceRegistry>(subsystems_);
        registry_built_ = true;
    }

    void statement() {
        const Token& head = peek();
        if (head.kind != Token::Word) fail(head, "expected a statement keyword");
        if (head.text == "system") return system_stmt();
        if (head.text == "lab") return lab_stmt();
        if (head.text == "agent") return agent_stmt();
        if (head.text == "init") return init_stmt();
        if (head.text == "measure") return measure_stmt();
        if (head.text == "prepare") return prepare_stmt();
        if (head.text == "announce") return announce_stmt();
        fail(head, "unknown statement '" + head.text + "'");
    }

    void system_stmt() {
        const Token& at = advance();
        if (registry_built_) fail(at, "system declarations must precede steps and init");
        std::string name = expect_word("system name").text;
        expect_keyword("labels");
        std::vector<std::string> labels;
        while (peek().kind == Token::Word) labels.push_back(advance().text);
        if (labels.empty()) fail(peek(), "expected at least one label");
        subsystems_.push_back({name, labels});
        end_statement();
    }

    void lab_stmt() {
        advance();
        std::string name = expect_word("lab name").text;
        expect_keyword("contains");
        std::vector<std::string> members;
        while (peek().kind == Token::Word) members.push_back(advance().text);
        if (members.empty()) fail(peek(), "expected at least one subsystem");
        scenario_.labs.push_back({name, members});
        end_statement();
    }

    void agent_stmt() {
        advance();
        std::string name = expect_word("agent name").text;
        const Token& where = expect_word("'inside <lab>' or 'outside'");
        if (where.text == "inside") {
            scenario_.agents.push_back({name, expect_word("lab name").text});
        } else if (where.text == "outside") {
            scenario_.agents.push_back({name, std::nullopt});
        } else {
            fail(where, "expected 'inside' or 'outside'");
        }
        end_statement();
    }

    double coefficient() {
        const Token& tok = peek();
        if (tok.kind == Token::Word && tok.text == "sqrt") {
            advance();
            expect_punct("(");
            const Token& a = advance();
            if (a.kind != Token::Number) fail(a, "expected a number in sqrt()");
            expect_punct("/");
            const Token& b = advance();
            if (b.kind != Token::Number) fail(b, "expected a number in sqrt()");
            expect_punct(")");
            if (b.value == 0.0) fail(b, "division by zero");
            return std::sqrt(a.value / b.value);
        }
        if (tok.kind == Token::Number) {
            advance();
            if (accept_punct("/")) {
                const Token& b = advance();
                if (b.kind != Token::Number) fail(b, "expected a denominator");
                if (b.value == 0.0) fail(b, "division by zero");
                return tok.value / b.value;
            }
            return tok.value;
        }
        fail(tok, "expected a coefficient");
    }

    KetTerm ket_term() {
        KetTerm term;
        if (peek().kind == Token::Number || (peek().kind == Token::Word && peek().text == "sqrt")) {
            term.coefficient = coefficient();
            expect_punct("*");
        }
        expect_punct("|");
        term.labels.push_back(expect_word("outcome label").text);
        while (accept_punct(",")) term.labels.push_back(expect_word("outcome label").text);
        expect_punct(">");
        return term;
    }

    std::vector<KetTerm> ket() {
        std::vector<KetTerm> terms;
        double sign = 1.0;
        if (accept_punct("-")) sign = -1.0;
        KetTerm first = ket_term();
        first.coefficient *= sign;
        terms.push_back(std::move(first));
        while (peek().kind == Token::Punct && (peek().text == "+" || peek().text == "-")) {
            double s = advance().text == "+" ? 1.0 : -1.0;
            KetTerm term = ket_term();
            term.coefficient *= s;
            terms.push_back(std::move(term));
        }
        return terms;
    }

    // Idempotent normalization: a vector that is already unit-norm is returned
    // bit-for-bit, so printing and re-parsing a scenario is a fixpoint.
    static Vector normalized(Vector v, double n) {
        if (std::abs(n - 1.0) > kZeroTol) v /= n;
        return v;
    }

    // Ket over the named subsystems (in that order), unnormalized.
    Vector ket_vector(const std::vector<KetTerm>& terms, const std::vector<std::string>& systems,
                      const Token& at) {
        std::vector<const Subsystem*> subs;
        int dim = 1;
        for (const auto& name : systems) {
            subs.push_back(&scenario_.registry->subsystem(name));
            dim *= subs.back()->dimension();
        }
        Vector v = Vector::Zero(dim);
        for (const auto& term : terms) {
            if (term.labels.size() != subs.size()) {
                fail(at, "ket has " + std::to_string(term.labels.size()) + " labels, expected " +
                             std::to_string(subs.size()));
            }
            int idx = 0;
            for (size_t i = 0; i < subs.size(); ++i) {
                idx = idx * subs[i]->dimension() + subs[i]->label_index(term.labels[i]);
            }
            v[idx] += term.coefficient;
        }
        return v;
    }

    void init_stmt() {
        const Token& at = advance();
        ensure_registry(at);
        if (scenario_.initial_state.amplitudes.size() > 0) fail(at, "duplicate init statement");
        std::vector<std::string> all;
        for (const auto& sub : scenario_.registry->subsystems()) all.push_back(sub.name);
        Vector v = ket_vector(ket(), all, at);
        double n = v.norm();
        if (n < kZeroTol) fail(at, "init state is the zero vector");
        scenario_.initial_state = make_state(scenario_.registry, normalized(std::move(v), n));
        end_statement();
    }

    void measure_stmt() {
        const Token& at = advance();
        ensure_registry(at);
        std::string agent_name = expect_word("agent name").text;
        expect_keyword("on");
        std::vector<std::string> targets;
        targets.push_back(expect_word("subsystem name").text);
        while (peek().kind == Token::Word && peek().text != "basis") {
            targets.push_back(advance().text);
        }
        expect_keyword("basis");
        for (const auto& t : targets) scenario_.registry->subsystem(t);  // existence check

        std::vector<std::pair<std::string, Vector>> vectors;
        if (accept_word("computational")) {
            int dim = 1;
            std::vector<const Subsystem*> subs;
            for (const auto& t : targets) {
                subs.push_back(&scenario_.registry->subsystem(t));
                dim *= subs.back()->dimension();
            }
            for (int k = 0; k < dim; ++k) {
                int rem = k;
                std::string label;
                std::vector<int> digits(subs.size());
                for (int i = static_cast<int>(subs.size()) - 1; i >= 0; --i) {
                    digits[i] = rem % subs[i]->dimension();
                    rem /= subs[i]->dimension();
                }
                for (size_t i = 0; i < subs.size(); ++i) {
                    if (i) label += ",";
                    label += subs[i]->labels[digits[i]];
                }
                Vector v = Vector::Zero(dim);
                v[k] = 1.0;
                vectors.emplace_back(label, std::move(v));
            }
        } else {
            expect_punct("{");
            while (true) {
                const Token& lt = peek();
                std::string label = expect_word("outcome label").text;
                expect_punct("=");
                Vector v = ket_vector(ket(), targets, lt);
                double n = v.norm();
                if (n < kZeroTol) fail(lt, "basis ket for '" + label + "' is the zero vector");
                vectors.emplace_back(label, normalized(std::move(v), n));  // kets auto-normalized
                if (accept_punct(";")) continue;
                expect_punct("}");
                break;
            }
        }

        const Agent* agent = nullptr;
        for (const auto& a : scenario_.agents) {
            if (a.name == agent_name) agent = &a;
        }
        if (!agent) fail(at, "unknown agent '" + agent_name + "'");
        Visibility vis = agent->lab ? Visibility::Sealed : Visibility::Open;
        if (accept_word("sealed")) {
            vis = Visibility::Sealed;
        } else if (accept_word("open")) {
            vis = Visibility::Open;
        }

        MeasurementBasis basis;
        try {
            basis = make_basis(*scenario_.registry, targets, std::move(vectors));
        } catch (const Error& e) {
            fail(at, e.what());
        }
        std::string id = next_step_id();
        scenario_.steps.push_back(MeasureStep{id, agent_name, std::move(basis), vis});
        last_measure_by_agent_[agent_name] = id;
        end_statement();
    }

    void prepare_stmt() {
        const Token& at = advance();
        ensure_registry(at);
        std::string target = expect_word("target subsystem").text;
        expect_keyword("controlled");
        expect_punct("-");
        expect_keyword("by");
        std::string control = expect_word("control subsystem").text;
        expect_keyword("map");
        const Subsystem& target_sub = scenario_.registry->subsystem(target);
        std::vector<std::pair<std::string, Vector>> map;
        while (true) {
            const Token& lt = peek();
            std::string label = expect_word("control label").text;
            expect_punct("->");
            Vector v = ket_vector(ket(), {target}, lt);
            double n = v.norm();
            if (n < kZeroTol) fail(lt, "prepare ket for '" + label + "' is the zero vector");
            if (v.size() != target_sub.dimension()) fail(lt, "prepare ket has wrong dimension");
            map.emplace_back(label, normalized(std::move(v), n));
            if (!accept_punct(";")) break;
        }
        scenario_.steps.push_back(PrepareStep{next_step_id(), target, control, std::move(map)});
        end_statement();
    }

    void announce_stmt() {
        const Token& at = advance();
        std::string announcer = expect_word("agent name").text;
        expect_keyword("to");
        std::vector<std::string> receivers;
        if (!accept_word("all")) {
            while (peek().kind == Token::Word) receivers.push_back(advance().text);
            if (receivers.empty()) fail(peek(), "expected receiver names or 'all'");
        }
        auto it = last_measure_by_agent_.find(announcer);
        if (it == last_measure_by_agent_.end()) {
            fail(at, "agent '" + announcer + "' has no earlier measurement to announce");
        }
        scenario_.steps.push_back(AnnounceStep{next_step_id(), announcer, it->second, receivers});
        end_statement();
    }

    void finish() {
        const Token& tok = tokens_.back();
        if (!registry_built_) {
            if (subsystems_.empty()) throw ParseError(tok.line, tok.column, "no systems declared");
            scenario_.registry = std::make_shared<SpaceRegistry>(subsystems_);
            registry_built_ = true;
        }
        if (scenario_.initial_state.amplitudes.size() == 0) {
            throw ParseError(tok.line, tok.column, "missing init statement");
        }
        scenario_.name = name_;
    }
};

std::string fmt_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void render_ket(std::ostringstream& out, const Vector& v,
                const std::vector<const Subsystem*>& subs) {
    bool first = true;
    for (int idx = 0; idx < v.size(); ++idx) {
        double c = v[idx].real();
        if (std::abs(v[idx].imag()) > kZeroTol) {
            throw Error("cannot render complex amplitudes in scenario text");
        }
        if (std::abs(c) < kZeroTol) continue;
        if (first) {
            if (c < 0) out << "- ";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        out << fmt_number(std::abs(c)) << "*|";
        int rem = idx;
        std::vector<int> digits(subs.size());
        for (int i = static_cast<int>(subs.size()) - 1; i >= 0; --i) {
            digits[i] = rem % subs[i]->dimension();
            rem /= subs[i]->dimension();
        }
        for (size_t i = 0; i < subs.size(); ++i) {
            if (i) out << ",";
            out << subs[i]->labels[digits[i]];
        }
        out << ">";
    }
    if (first) throw Error("cannot render the zero vector");
}

bool is_computational(const MeasurementBasis& basis, const SpaceRegistry& registry) {
    int dim = 1;
    for (const auto& t : basis.targets) dim *= registry.subsystem(t).dimension();
    if (basis.outcome_count() != dim) return false;
    for (int k = 0; k < dim; ++k) {
        const Vector& v = basis.vectors[k].second;
        for (int i = 0; i < dim; ++i) {
            if (std::abs(v[i] - (i == k ? 1.0 : 0.0)) > kZeroTol) return false;
        }
    }
    // Labels must also be the canonical comma-joined subsystem labels.
    std::vector<const Subsystem*> subs;
    for (const auto& t : basis.targets) subs.push_back(&registry.subsystem(t));
    for (int k = 0; k < dim; ++k) {
        int rem = k;
        std::vector<int> digits(subs.size());
        for (int i = static_cast<int>(subs.size()) - 1; i >= 0; --i) {
            digits[i] = rem % subs[i]->dimension();
            rem /= subs[i]->dimension();
        }
        std::string label;
        for (size_t i = 0; i < subs.size(); ++i) {
            if (i) label += ",";
            label += subs[i]->labels[digits[i]];
        }
        if (basis.vectors[k].first != label) return false;
    }
    return true;
}

}  // namespace

Scenario parse_scenario(const std::string& source, const std::string& name) {
    return Parser(source, name).parse();
}

std::string render_scenario(const Scenario& scenario) {
    std::ostringstream out;
    for (const auto& sub : scenario.registry->subsystems()) {
        out << "system " << sub.name << " labels";
        for (const auto& l : sub.labels) out << " " << l;
        out << "\n";
    }
    for (const auto& lab : scenario.labs) {
        out << "lab " << lab.name << " contains";
        for (const auto& s : lab.subsystems) out << " " << s;
        out << "\n";
    }
    for (const auto& agent : scenario.agents) {
        out << "agent " << agent.name << " "
            << (agent.lab ? "inside " + *agent.lab : std::string("outside")) << "\n";
    }
    std::vector<const Subsystem*> all;
    for (const auto& sub : scenario.registry->subsystems()) all.push_back(&sub);
    out << "init ";
    render_ket(out, scenario.initial_state.amplitudes, all);
    out << "\n";
    for (const auto& step : scenario.steps) {
        if (const auto* m = std::get_if<MeasureStep>(&step)) {
            out << "measure " << m->measurer << " on";
            for (const auto& t : m->basis.targets) out << " " << t;
            out << " basis ";
            if (is_computational(m->basis, *scenario.registry)) {
                out << "computational";
            } else {
                std::vector<const Subsystem*> subs;
                for (const auto& t : m->basis.targets) {
                    subs.push_back(&scenario.registry->subsystem(t));
                }
                out << "{";
                for (int k = 0; k < m->basis.outcome_count(); ++k) {
                    if (k) out << "; ";
                    out << m->basis.vectors[k].first << " = ";
                    render_ket(out, m->basis.vectors[k].second, subs);
                }
                out << "}";
            }
            out << (m->visibility == Visibility::Sealed ? " sealed" : " open") << "\n";
        } else if (const auto* p = std::get_if<PrepareStep>(&step)) {
            out << "prepare " << p->target << " controlled-by " << p->control << " map ";
            std::vector<const Subsystem*> subs{&scenario.registry->subsystem(p->target)};
            for (size_t i = 0; i < p->map.size(); ++i) {
                if (i) out << " ; ";
                out << p->map[i].first << " -> ";
                render_ket(out, p->map[i].second, subs);
            }
            out << "\n";
        } else {
            const auto& an = std::get<AnnounceStep>(step);
            out << "announce " << an.announcer << " to";
            if (an.receivers.empty()) {
                out << " all";
            } else {
                for (const auto& r : an.receivers) out << " " << r;
            }
            out << "\n";
        }
    }
    return out.str();
}

bool scenario_equal(const Scenario& a, const Scenario& b, double tol) {
    if (!(*a.registry == *b.registry)) return false;
    if (a.agents.size() != b.agents.size() || a.labs.size() != b.labs.size()) return false;
    for (size_t i = 0; i < a.agents.size(); ++i) {
        if (a.agents[i].name != b.agents[i].name || a.agents[i].lab != b.agents[i].lab) {
            return false;
        }
    }
    for (size_t i = 0; i < a.labs.size(); ++i) {
        if (a.labs[i].name != b.labs[i].name || a.labs[i].subsystems != b.labs[i].subsystems) {
            return false;
        }
    }
    if ((a.initial_state.amplitudes - b.initial_state.amplitudes).lpNorm<Eigen::Infinity>() > tol) {
        return false;
    }
    if (a.steps.size() != b.steps.size()) return false;
    for (size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i].index() != b.steps[i].index()) return false;
        if (step_id(a.steps[i]) != step_id(b.steps[i])) return false;
        if (const auto* ma = std::get_if<MeasureStep>(&a.steps[i])) {
            const auto& mb = std::get<MeasureStep>(b.steps[i]);
            if (ma->measurer != mb.measurer || ma->visibility != mb.visibility) return false;
            if (ma->basis.targets != mb.basis.targets) return false;
            if (ma->basis.outcome_count() != mb.basis.outcome_count()) return false;
            for (int k = 0; k < ma->basis.outcome_count(); ++k) {
                if (ma->basis.vectors[k].first != mb.basis.vectors[k].first) return false;
                if ((ma->basis.vectors[k].second - mb.basis.vectors[k].second)
                        .lpNorm<Eigen::Infinity>() > tol) {
                    return false;
                }
            }
        } else if (const auto* pa = std::get_if<PrepareStep>(&a.steps[i])) {
            const auto& pb = std::get<PrepareStep>(b.steps[i]);
            if (pa->target != pb.target || pa->control != pb.control) return false;
            if (pa->map.size() != pb.map.size()) return false;
            for (size_t k = 0; k < pa->map.size(); ++k) {
                if (pa->map[k].first != pb.map[k].first) return false;
                if ((pa->map[k].second - pb.map[k].second).lpNorm<Eigen::Infinity>() > tol) {
                    return false;
                }
            }
        } else {
            const auto& aa = std::get<AnnounceStep>(a.steps[i]);
            const auto& ab = std::get<AnnounceStep>(b.steps[i]);
            if (aa.announcer != ab.announcer || aa.of_step != ab.of_step ||
                aa.receivers != ab.receivers) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace wigner

#include "r2r/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace r2r::io {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        const size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

int parse_int(const std::string& text, const char* what) {
    size_t consumed = 0;
    int value = 0;
    try {
        value = std::stoi(text, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("cannot parse ") + what + " from '" +
                                    text + "'");
    }
    if (consumed != text.size())
        throw std::invalid_argument(std::string("trailing characters in ") + what +
                                    " '" + text + "'");
    return value;
}

}  // namespace

std::string format_deck(const Deck& deck) {
    std::string out;
    for (int i = 0; i < deck.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(deck.order()[static_cast<size_t>(i)]);
    }
    return out;
}

Deck parse_deck(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty deck string");
    std::vector<Card> order;
    for (const std::string& part : split(text, ','))
        order.push_back(parse_int(part, "card label"));
    return Deck(std::move(order));
}

std::string format_shuffle(Shuffle s) {
    return std::to_string(s.a) + ">" + std::to_string(s.b);
}

Shuffle parse_shuffle(const std::string& text) {
    const auto parts = split(text, '>');
    if (parts.size() != 2)
        throw std::invalid_argument("shuffle must look like 'a>b', got '" + text + "'");
    return Shuffle{parse_int(parts[0], "shuffle a"), parse_int(parts[1], "shuffle b")};
}

std::string format_path(const ShufflePath& path) {
    std::string out;
    for (size_t i = 0; i < path.size(); ++i) {
        if (i) out += ';';
        out += format_shuffle(path[i]);
    }
    return out;
}

ShufflePath parse_path(const std::string& text) {
    ShufflePath path;
    if (text.empty()) return path;
    for (const std::string& part : split(text, ';')) path.push_back(parse_shuffle(part));
    return path;
}

double round_sig(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string coupled_outcome_to_json(const CoupledOutcome& outcome) {
    nlohmann::json j;
    if (outcome.T)
        j["T"] = *outcome.T;
    else
        j["T"] = "inf";
    j["coalesced"] = outcome.coalesced;
    j["good_times"] = outcome.good_times;
    j["x_final"] = format_deck(outcome.x_final);
    j["x_prime_final"] = format_deck(outcome.x_prime_final);
    return j.dump();
}

std::string matrix_to_csv(const chain::TransitionMatrix& m) {
    std::string out = "state";
    for (const auto& label : m.labels) out += "," + label;
    out += '\n';
    for (int r = 0; r < m.size; ++r) {
        out += m.labels[static_cast<size_t>(r)];
        for (int c = 0; c < m.size; ++c) out += "," + format_double(m.at(r, c));
        out += '\n';
    }
    return out;
}

std::string matrix_to_json(const chain::TransitionMatrix& m) {
    nlohmann::json j;
    j["kind"] = m.kind == chain::TransitionMatrix::Kind::stochastic ? "stochastic"
                                                                    : "generator";
    j["states"] = m.labels;
    if (m.deck_size) j["n"] = *m.deck_size;
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.size; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.size; ++c) row.push_back(round_sig(m.at(r, c)));
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump();
}

}  // namespace r2r::io

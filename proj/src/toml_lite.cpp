#include "strainsis/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "strainsis/errors.hpp"

namespace strainsis::toml_lite {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw validation_error("toml parse error (line " + std::to_string(line) + "): " + what);
    }

    void skip_ws_in_line() {
        while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
    }

    /// Whitespace, newlines and comments.
    void skip_ws_and_comments() {
        while (!done()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }
};

std::string parse_basic_string(Cursor& cur) {
    cur.take(); // opening quote
    std::string out;
    while (true) {
        if (cur.done()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline inside string");
        if (c == '\\') {
            if (cur.done()) cur.fail("dangling escape");
            const char esc = cur.take();
            switch (esc) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: cur.fail(std::string("unsupported escape \\") + esc);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& cur) {
    std::string key;
    while (!cur.done() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
    if (key.empty()) cur.fail("expected a key");
    return key;
}

std::vector<std::string> parse_dotted_key(Cursor& cur) {
    std::vector<std::string> parts;
    while (true) {
        cur.skip_ws_in_line();
        if (!cur.done() && cur.peek() == '"') {
            parts.push_back(parse_basic_string(cur));
        } else {
            parts.push_back(parse_bare_key(cur));
        }
        cur.skip_ws_in_line();
        if (!cur.done() && cur.peek() == '.') {
            cur.take();
            continue;
        }
        return parts;
    }
}

nlohmann::json parse_value(Cursor& cur);

nlohmann::json parse_array(Cursor& cur) {
    cur.take(); // '['
    nlohmann::json arr = nlohmann::json::array();
    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            return arr;
        }
        arr.push_back(parse_value(cur));
        cur.skip_ws_and_comments();
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
}

nlohmann::json parse_inline_table(Cursor& cur) {
    cur.take(); // '{'
    nlohmann::json obj = nlohmann::json::object();
    cur.skip_ws_in_line();
    if (!cur.done() && cur.peek() == '}') {
        cur.take();
        return obj;
    }
    while (true) {
        cur.skip_ws_in_line();
        std::vector<std::string> key = parse_dotted_key(cur);
        cur.skip_ws_in_line();
        if (cur.done() || cur.take() != '=') cur.fail("expected '=' in inline table");
        cur.skip_ws_in_line();
        nlohmann::json* slot = &obj;
        for (std::size_t i = 0; i + 1 < key.size(); ++i) slot = &(*slot)[key[i]];
        (*slot)[key.back()] = parse_value(cur);
        cur.skip_ws_in_line();
        if (cur.done()) cur.fail("unterminated inline table");
        const char c = cur.take();
        if (c == '}') return obj;
        if (c != ',') cur.fail("expected ',' or '}' in inline table");
    }
}

nlohmann::json parse_scalar(Cursor& cur) {
    std::string tok;
    while (!cur.done()) {
        const char c = cur.peek();
        if (c == ',' || c == ']' || c == '}' || c == '\n' || c == '#' || c == ' ' || c == '\t' ||
            c == '\r') {
            break;
        }
        tok.push_back(cur.take());
    }
    if (tok.empty()) cur.fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;

    // TOML permits underscores in numbers.
    std::string digits;
    for (char c : tok)
        if (c != '_') digits.push_back(c);

    const bool looks_float = digits.find_first_of(".eE") != std::string::npos ||
                             digits == "inf" || digits == "-inf" || digits == "nan";
    if (!looks_float) {
        long long iv = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), iv);
        if (ec == std::errc() && p == digits.data() + digits.size()) return iv;
    }
    try {
        std::size_t used = 0;
        const double dv = std::stod(digits, &used);
        if (used == digits.size()) return dv;
    } catch (...) {
    }
    cur.fail("cannot parse value '" + tok + "'");
}

nlohmann::json parse_value(Cursor& cur) {
    cur.skip_ws_in_line();
    if (cur.done()) cur.fail("expected a value");
    const char c = cur.peek();
    if (c == '"') return parse_basic_string(cur);
    if (c == '[') return parse_array(cur);
    if (c == '{') return parse_inline_table(cur);
    return parse_scalar(cur);
}

} // namespace

nlohmann::json parse(std::string_view text) {
    Cursor cur{text};
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;

    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) break;

        if (cur.peek() == '[') {
            cur.take();
            if (!cur.done() && cur.peek() == '[') cur.fail("arrays of tables are not supported");
            std::vector<std::string> path = parse_dotted_key(cur);
            cur.skip_ws_in_line();
            if (cur.done() || cur.take() != ']') cur.fail("expected ']' after table header");
            table = &root;
            for (const std::string& part : path) table = &(*table)[part];
            if (!table->is_object() && !table->is_null()) cur.fail("table path collides with a value");
            continue;
        }

        std::vector<std::string> key = parse_dotted_key(cur);
        cur.skip_ws_in_line();
        if (cur.done() || cur.take() != '=') cur.fail("expected '=' after key");
        nlohmann::json* slot = table;
        for (std::size_t i = 0; i + 1 < key.size(); ++i) slot = &(*slot)[key[i]];
        (*slot)[key.back()] = parse_value(cur);
        cur.skip_ws_in_line();
        if (!cur.done() && cur.peek() == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.take();
        }
        if (!cur.done() && cur.peek() != '\n') cur.fail("trailing characters after value");
    }
    return root;
}

} // namespace strainsis::toml_lite

#include "jsonl.hpp"

#include <algorithm>

#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"

namespace memeattr::jsonl {

void for_each_line(std::istream& in, const std::function<void(std::size_t, std::string_view)>& fn) {
    std::string buf;
    std::size_t line = 0;
    while (std::getline(in, buf)) {
        ++line;
        std::string_view text(buf);
        if (line == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        const bool blank = std::all_of(text.begin(), text.end(), [](char c) {
            return c == ' ' || c == '\t';
        });
        if (blank) continue;
        fn(line, text);
    }
    if (in.bad()) throw IoError("read failure at line " + std::to_string(line + 1));
}

json parse_object(std::string_view text, std::size_t line) {
    json obj;
    try {
        obj = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(line, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line, "record is not an object");
    return obj;
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw SchemaError(key, "missing (line " + std::to_string(line) + ")");
    }
    if (!it->is_string()) throw SchemaError(key, "not a string (line " + std::to_string(line) + ")");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(key, "not a string (line " + std::to_string(line) + ")");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, std::size_t line) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw SchemaError(key, "not a list (line " + std::to_string(line) + ")");
    for (const auto& v : *it) {
        if (!v.is_string()) {
            throw SchemaError(key, "list item is not a string (line " + std::to_string(line) + ")");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

void note_unknown_fields(const json& obj, std::initializer_list<std::string_view> known,
                         std::size_t line, std::vector<std::string>* warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) != known.end()) continue;
        std::string msg = "line " + std::to_string(line) + ": unknown field '" + it.key() + "' ignored";
        logger().warn("{}", msg);
        if (warnings) warnings->push_back(std::move(msg));
    }
}

std::string dump_line(const json& obj) {
    return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace memeattr::jsonl

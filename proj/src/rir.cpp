#include "memeattr/rir.hpp"

#include <vector>

#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::rir {

namespace {

struct Template {
    std::string_view preamble;
    std::string_view input_header;
    std::string_view image;
    std::string_view text;
    std::string_view description;
    std::string_view knowledge;
    std::string_view no_knowledge;
    std::string_view nonharmful;
    std::string_view harmful;
    std::string_view output_header;
    std::string_view answer_line;
    std::string_view reason_line;
    std::string_view colon;
    std::string_view image_attached;
    std::string_view image_unavailable;
    std::string_view image_absent;
};

constexpr Template kEnglish{
    "You are a meme analysis expert proficient in Chinese internet culture and social psychology.\n"
    "Given a Chinese meme and two opposing interpretive perspectives (harmful vs. non-harmful), determine "
    "whether the meme expresses harmful content. Provide a clear decision and a concise justification.\n",
    "Input Information:",
    "Meme Image: ",
    "Meme Text: ",
    "Meme Image Description: ",
    "Meme Background Knowledge:",
    "(none retrieved)",
    "Interpretation of Non-harmful Perspective: ",
    "Interpretation of Harmful Perspective: ",
    "Output Requirements:",
    "Answer: {Harmful / Non-harmful}",
    "Reason: {concise justification}",
    ": ",
    "[attached]",
    "(not viewable; use the image description)",
    "(none; use the image description)",
};

constexpr Template kChinese{
    "你是一名精通中国网络文化与社会心理学的表情包分析专家。\n"
    "给定一个中文表情包以及有害与无害两种对立的解读视角，请判断该表情包是否表达了有害内容，"
    "并给出明确的结论和简洁的理由。\n",
    "输入信息：",
    "表情包图像：",
    "表情包文本：",
    "表情包图像描述：",
    "表情包背景知识：",
    "（未检索到相关知识）",
    "无害视角解读：",
    "有害视角解读：",
    "输出要求：",
    "答案：{有害 / 无害}",
    "理由：{简洁的理由}",
    "：",
    "[见附图]",
    "（无法直接查看，请参考图像描述）",
    "（无，请参考图像描述）",
};

const Template& template_for(PromptLanguage lang) {
    return lang == PromptLanguage::Chinese ? kChinese : kEnglish;
}

std::string image_slot(const Template& t, const MemeTuple& meme, bool attached) {
    if (!meme.image) return std::string(t.image_absent);
    return std::string(attached ? t.image_attached : t.image_unavailable);
}

void append_knowledge(std::string& out, const Template& t, const ake::KnowledgeContext& knowledge) {
    out += t.knowledge;
    if (knowledge.fragments.empty()) {
        out += ' ';
        out += t.no_knowledge;
        out += '\n';
        return;
    }
    out += '\n';
    for (const auto& f : knowledge.fragments) {
        out += "- ";
        out += f.entry.term;
        out += t.colon;
        out += f.entry.definition;
        out += '\n';
    }
}

// ---------------------------------------------------------------------------
// Decision parsing. Everything works on code points so that a position in the
// folded copy is also a position in the original text.

using Cps = std::vector<char32_t>;

Cps fold(const Cps& in) {
    Cps out;
    out.reserve(in.size());
    for (char32_t cp : in) {
        cp = utf8::fold_width(cp);
        if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
        if (cp >= 0x2010 && cp <= 0x2015) cp = U'-';
        out.push_back(cp);
    }
    return out;
}

bool starts_with(const Cps& s, std::size_t at, std::u32string_view prefix) {
    if (at + prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (s[at + i] != prefix[i]) return false;
    }
    return true;
}

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\r'; }
bool is_ascii_letter(char32_t c) { return c >= U'a' && c <= U'z'; }

struct Line {
    std::size_t begin;
    std::size_t end;  // exclusive, without '\n'
};

std::vector<Line> split_lines(const Cps& s) {
    std::vector<Line> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == U'\n') {
            lines.push_back({start, i});
            start = i + 1;
        }
    }
    return lines;
}

/// If the line is "<key>:" (allowing markdown decoration), the offset just
/// past the colon.
std::optional<std::size_t> key_offset(const Cps& folded, const Line& line,
                                      std::initializer_list<std::u32string_view> keys) {
    std::size_t i = line.begin;
    while (i < line.end && (is_space(folded[i]) || folded[i] == U'*' || folded[i] == U'#' || folded[i] == U'>')) ++i;
    for (auto key : keys) {
        if (!starts_with(folded, i, key)) continue;
        std::size_t j = i + key.size();
        while (j < line.end && (is_space(folded[j]) || folded[j] == U'*')) ++j;
        if (j < line.end && folded[j] == U':') {
            ++j;
            while (j < line.end && folded[j] == U'*') ++j;
            return j;
        }
    }
    return std::nullopt;
}

struct LabelCounts {
    std::size_t harmful = 0;
    std::size_t non_harmful = 0;

    std::size_t total() const { return harmful + non_harmful; }
};

LabelCounts count_labels(const Cps& folded, std::size_t begin, std::size_t end) {
    Cps s(folded.begin() + static_cast<std::ptrdiff_t>(begin), folded.begin() + static_cast<std::ptrdiff_t>(end));
    LabelCounts counts;
    static constexpr std::u32string_view kNon[] = {U"non-harmful", U"non harmful", U"nonharmful", U"无害"};
    for (auto pat : kNon) {
        for (std::size_t i = 0; i + pat.size() <= s.size(); ++i) {
            if (starts_with(s, i, pat) && (i == 0 || !is_ascii_letter(s[i - 1]))) {
                ++counts.non_harmful;
                for (std::size_t k = 0; k < pat.size(); ++k) s[i + k] = U' ';
            }
        }
    }
    static constexpr std::u32string_view kYes[] = {U"harmful", U"有害"};
    for (auto pat : kYes) {
        for (std::size_t i = 0; i + pat.size() <= s.size(); ++i) {
            if (!starts_with(s, i, pat)) continue;
            if (pat == U"harmful" && i > 0 && is_ascii_letter(s[i - 1])) continue;
            ++counts.harmful;
        }
    }
    return counts;
}

std::optional<HarmLabel> single_label(const LabelCounts& c) {
    if (c.harmful > 0 && c.non_harmful == 0) return HarmLabel::Harmful;
    if (c.non_harmful > 0 && c.harmful == 0) return HarmLabel::NonHarmful;
    return std::nullopt;
}

std::string slice(const Cps& s, std::size_t begin, std::size_t end) {
    return utf8::encode(Cps(s.begin() + static_cast<std::ptrdiff_t>(begin), s.begin() + static_cast<std::ptrdiff_t>(end)));
}

}  // namespace

void MemeTuple::validate() const {
    if (utf8::trim(text).empty() && utf8::trim(description).empty()) {
        throw InvalidArgument("meme needs a text or a description");
    }
}

MemeTuple MemeTuple::from_record(const kb::MemeRecord& record) {
    return MemeTuple{record.image_ref, record.text, record.description};
}

void AttributionInput::validate() const {
    meme.validate();
    if (utf8::trim(exp_nonharmful).empty()) throw InvalidArgument("non-harmful interpretation is empty");
    if (utf8::trim(exp_harmful).empty()) throw InvalidArgument("harmful interpretation is empty");
}

PromptLanguage resolve_language(PromptLanguage requested, const MemeTuple& meme) {
    if (requested != PromptLanguage::Auto) return requested;
    return utf8::contains_cjk(meme.text) || utf8::contains_cjk(meme.description) ? PromptLanguage::Chinese
                                                                                  : PromptLanguage::English;
}

std::string build_rir_prompt(const AttributionInput& input, const PromptOptions& options) {
    input.validate();
    const auto& t = template_for(resolve_language(options.language, input.meme));
    std::string out;
    out += t.preamble;
    out += '\n';
    out += t.input_header;
    out += '\n';
    out += t.image;
    out += image_slot(t, input.meme, options.image_attached);
    out += '\n';
    out += t.text;
    out += input.meme.text;
    out += '\n';
    out += t.description;
    out += input.meme.description;
    out += '\n';
    append_knowledge(out, t, input.knowledge);
    out += t.nonharmful;
    out += input.exp_nonharmful;
    out += '\n';
    out += t.harmful;
    out += input.exp_harmful;
    out += "\n\n";
    out += t.output_header;
    out += '\n';
    out += t.answer_line;
    out += '\n';
    out += t.reason_line;
    out += '\n';
    return out;
}

std::string_view to_string(ParseStatus status) noexcept {
    switch (status) {
        case ParseStatus::Clean: return "clean";
        case ParseStatus::Recovered: return "recovered";
        case ParseStatus::Fallback: return "fallback";
    }
    return "fallback";
}

Decision parse_decision(std::string_view response) {
    Decision d;
    d.raw_response = std::string(response);
    const Cps raw = utf8::decode(response);
    const Cps folded = fold(raw);
    const auto lines = split_lines(folded);

    std::optional<std::size_t> answer_line;
    std::optional<std::size_t> answer_at;
    for (std::size_t i = 0; i < lines.size() && !answer_line; ++i) {
        if (auto at = key_offset(folded, lines[i], {U"answer", U"final answer", U"答案"})) {
            answer_line = i;
            answer_at = *at;
        }
    }

    std::optional<std::string> reason;
    const std::size_t reason_search_from = answer_line ? *answer_line + 1 : 0;
    for (std::size_t i = reason_search_from; i < lines.size() && !reason; ++i) {
        if (auto at = key_offset(folded, lines[i], {U"reason", U"理由", U"原因"})) {
            reason = utf8::trim(slice(raw, *at, raw.size()));
        }
    }

    if (answer_line) {
        const auto counts = count_labels(folded, *answer_at, lines[*answer_line].end);
        if (counts.total() == 1) {
            d.label = *single_label(counts);
            if (reason) {
                d.reason = *reason;
                d.parse_status = ParseStatus::Clean;
                return d;
            }
            std::string rest = utf8::trim(slice(raw, lines[*answer_line].end, raw.size()));
            d.reason = rest.empty() ? utf8::trim(response) : rest;
            d.parse_status = ParseStatus::Recovered;
            return d;
        }
    }

    if (auto label = single_label(count_labels(folded, 0, folded.size()))) {
        d.label = *label;
        d.reason = reason ? *reason : utf8::trim(response);
        d.parse_status = ParseStatus::Recovered;
        return d;
    }

    logger().warn("unparseable verdict, falling back to non-harmful: {}", utf8::truncate(response, 80));
    d.label = HarmLabel::NonHarmful;
    d.reason = std::string(response);
    d.parse_status = ParseStatus::Fallback;
    return d;
}

std::string render_decision(HarmLabel label, std::string_view reason) {
    std::string out = label == HarmLabel::Harmful ? "Answer: Harmful\nReason: " : "Answer: Non-harmful\nReason: ";
    out += reason;
    return out;
}

Decision attribute(const AttributionInput& input, model::ModelBackend& model, const AttributeOptions& options) {
    PromptOptions prompt_options = options.prompt;
    prompt_options.image_attached = input.meme.image.has_value() && model.supports_vision();

    model::ChatRequest req;
    req.user = build_rir_prompt(input, prompt_options);
    if (prompt_options.image_attached) req.image = input.meme.image;
    req.decoding.temperature = 0.0;
    req.decoding.max_tokens = options.max_tokens;
    return parse_decision(model.chat(req).text);
}

model::ChatRequest stance_request(const MemeTuple& meme, const ake::KnowledgeContext& knowledge, HarmLabel stance,
                                  PromptLanguage language) {
    meme.validate();
    const auto lang = resolve_language(language, meme);
    const auto& t = template_for(lang);
    std::string user;
    user += t.text;
    user += meme.text;
    user += '\n';
    user += t.description;
    user += meme.description;
    user += '\n';
    append_knowledge(user, t, knowledge);
    if (lang == PromptLanguage::Chinese) {
        user += stance == HarmLabel::Harmful ? "请从有害的角度" : "请从无害的角度";
        user += "写一段简洁的解读，说明该表情包为何可以被这样理解。只输出解读内容。";
    } else {
        user += stance == HarmLabel::Harmful ? "Argue that this meme is harmful" : "Argue that this meme is not harmful";
        user += ": write one concise interpretation supporting that reading. Reply with the interpretation only.";
    }
    model::ChatRequest req;
    req.system = std::string(t.preamble.substr(0, t.preamble.find('\n')));
    req.user = std::move(user);
    req.decoding.temperature = 0.0;
    req.decoding.max_tokens = 256;
    return req;
}

std::string generate_stance(const MemeTuple& meme, const ake::KnowledgeContext& knowledge, HarmLabel stance,
                            model::ModelBackend& model, std::size_t budget, PromptLanguage language) {
    const auto response = model.chat(stance_request(meme, knowledge, stance, language));
    return utf8::truncate(utf8::trim(response.text), budget);
}

NllScore nll(const model::TokenLogProbs& logprobs) {
    NllScore s;
    double sum = 0.0;
    for (const auto& t : logprobs.tokens) sum += t.logprob;
    s.value = 0.0 - sum;
    s.token_count = logprobs.tokens.size();
    return s;
}

NllScore classification_nll(const AttributionInput& input, HarmLabel gold, model::ModelBackend& scorer,
                            const PromptOptions& options) {
    const auto lang = resolve_language(options.language, input.meme);
    std::string answer;
    if (lang == PromptLanguage::Chinese) {
        answer = gold == HarmLabel::Harmful ? "答案：有害" : "答案：无害";
    } else {
        answer = gold == HarmLabel::Harmful ? "Answer: Harmful" : "Answer: Non-harmful";
    }
    return nll(scorer.token_logprobs(build_rir_prompt(input, options), answer));
}

NllScore explanation_nll(const AttributionInput& input, std::string_view explanation, model::ModelBackend& scorer,
                         const PromptOptions& options) {
    return nll(scorer.token_logprobs(build_rir_prompt(input, options), std::string(explanation)));
}

}  // namespace memeattr::rir

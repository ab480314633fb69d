#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gakco/error.hpp"

namespace gakco {

using symbol_t = std::uint8_t;

// Character shown when decoding the UNK code.
inline constexpr char unk_char = '?';

// Ordered symbol dictionary. Codes 0..symbols.size()-1 map to symbols; when
// some character fell outside the dictionary an extra UNK code is appended.
class Alphabet
{
  public:
    Alphabet() { lookup_.fill(-1); }

    explicit Alphabet(std::string_view symbols)
      : Alphabet()
    {
        for (char c : symbols)
            add_symbol(c);
    }

    // Returns the code of an existing symbol, or registers a new one.
    symbol_t add_symbol(char c)
    {
        auto u = static_cast<unsigned char>(fold(c));
        if (lookup_[u] >= 0)
            return static_cast<symbol_t>(lookup_[u]);
        if (unk_code_)
            throw InvalidArgument("cannot add symbols after UNK was assigned");
        if (symbols_.size() >= 255)
            throw InvalidArgument("alphabet exceeds 255 symbols");
        lookup_[u] = static_cast<int>(symbols_.size());
        symbols_.push_back(static_cast<char>(u));
        return static_cast<symbol_t>(symbols_.size() - 1);
    }

    std::optional<symbol_t> find(char c) const
    {
        int v = lookup_[static_cast<unsigned char>(fold(c))];
        if (v < 0)
            return std::nullopt;
        return static_cast<symbol_t>(v);
    }

    symbol_t unk()
    {
        if (!unk_code_)
            unk_code_ = static_cast<symbol_t>(symbols_.size());
        return *unk_code_;
    }

    std::optional<symbol_t> unk_code() const noexcept { return unk_code_; }
    const std::string&      symbols() const noexcept { return symbols_; }

    // Sigma: distinct codes, UNK included when present.
    std::size_t size() const noexcept { return symbols_.size() + (unk_code_ ? 1 : 0); }

    char decode(symbol_t code) const
    {
        if (unk_code_ && code == *unk_code_)
            return unk_char;
        if (code >= symbols_.size())
            throw InvalidArgument("symbol code out of range");
        return symbols_[code];
    }

    std::string decode(std::span<const symbol_t> codes) const
    {
        std::string out;
        out.reserve(codes.size());
        for (auto c : codes)
            out.push_back(decode(c));
        return out;
    }

    static char fold(char c)
    {
        auto u = static_cast<unsigned char>(c);
        return u < 0x80 ? static_cast<char>(std::toupper(u)) : c;
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b)
    {
        return a.symbols_ == b.symbols_ && a.unk_code_ == b.unk_code_;
    }

  private:
    std::string             symbols_;
    std::array<int, 256>    lookup_{};
    std::optional<symbol_t> unk_code_;
};

// Dictionary used for character-level text: [A-Z] then [0-9].
inline constexpr std::string_view text_dictionary = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

struct SequenceRecord
{
    std::string           id;
    std::optional<long>   label;
    std::vector<symbol_t> codes;

    std::size_t length() const noexcept { return codes.size(); }

    friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

struct SequenceCorpus
{
    Alphabet                    alphabet;
    std::vector<SequenceRecord> records;

    std::size_t n_sequences() const noexcept { return records.size(); }

    friend bool operator==(const SequenceCorpus&, const SequenceCorpus&) = default;
};

// Undecoded record as read from a file.
struct RawRecord
{
    std::string         id;
    std::optional<long> label;
    std::string         text;
};

namespace detail {

inline std::optional<long> parse_long(std::string_view s)
{
    long v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

inline std::string_view trim(std::string_view s)
{
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    while (!s.empty() && is_ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back()))
        s.remove_suffix(1);
    return s;
}

inline std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open input file: " + path.string());
    return in;
}

} // namespace detail

// Reads FASTA records; sequence lines may wrap arbitrarily. A header's second
// token is taken as the class label when it is an integer.
inline std::vector<RawRecord> read_fasta(const std::filesystem::path& path)
{
    auto in = detail::open_input(path);

    std::vector<RawRecord> out;
    std::string            line;
    std::size_t            lineno = 0;
    bool                   any_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = detail::trim(line);
        if (body.empty())
            continue;
        any_content = true;
        if (body.front() == '>') {
            auto header = detail::trim(body.substr(1));
            auto split  = header.find_first_of(" \t");
            RawRecord rec;
            rec.id = std::string(header.substr(0, split));
            if (split != std::string_view::npos) {
                auto rest  = detail::trim(header.substr(split));
                auto token = rest.substr(0, rest.find_first_of(" \t"));
                rec.label  = detail::parse_long(token);
            }
            out.push_back(std::move(rec));
        } else {
            if (out.empty())
                throw ParseError("sequence data before any FASTA header", lineno);
            for (char c : body)
                if (c != ' ' && c != '\t')
                    out.back().text.push_back(c);
        }
    }
    if (!any_content)
        throw ParseError("empty FASTA file: " + path.string());
    return out;
}

// Reads "<label>\t<text>" lines. Whitespace inside the text is dropped.
inline std::vector<RawRecord> read_labeled_text(const std::filesystem::path& path)
{
    auto in = detail::open_input(path);

    std::vector<RawRecord> out;
    std::string            line;
    std::size_t            lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("expected <label><TAB><text>", lineno);
        auto label = detail::parse_long(detail::trim(std::string_view(line).substr(0, tab)));
        if (!label)
            throw ParseError("unparsable label '" + line.substr(0, tab) + "'", lineno);
        RawRecord rec;
        rec.id    = "line" + std::to_string(lineno);
        rec.label = label;
        for (char c : std::string_view(line).substr(tab + 1))
            if (!std::isspace(static_cast<unsigned char>(c)))
                rec.text.push_back(c);
        out.push_back(std::move(rec));
    }
    if (out.empty())
        throw ParseError("empty labeled-text file: " + path.string());
    return out;
}

// Encodes raw records. With an explicit alphabet, anything outside it becomes
// UNK. Without one, symbols are registered in order of first appearance and
// only non-ASCII bytes become UNK.
inline SequenceCorpus encode_corpus(std::span<const RawRecord> raw, std::optional<std::string_view> alphabet_spec)
{
    SequenceCorpus corpus;
    const bool     infer = !alphabet_spec.has_value();
    if (!infer) {
        for (char c : *alphabet_spec) {
            if (Alphabet::fold(c) == unk_char)
                throw InvalidArgument(std::string("'") + unk_char + "' is reserved for the UNK symbol");
            if (corpus.alphabet.find(c))
                throw InvalidArgument(std::string("duplicate alphabet symbol '") + c + "'");
            corpus.alphabet.add_symbol(c);
        }
    } else {
        // Register every ASCII symbol before UNK so codes stay dense.
        for (const auto& r : raw)
            for (char c : r.text)
                if (static_cast<unsigned char>(c) < 0x80 && Alphabet::fold(c) != unk_char)
                    corpus.alphabet.add_symbol(c);
    }

    corpus.records.reserve(raw.size());
    for (const auto& r : raw) {
        SequenceRecord rec{r.id, r.label, {}};
        rec.codes.reserve(r.text.size());
        for (char c : r.text) {
            auto code = corpus.alphabet.find(c);
            rec.codes.push_back(code ? *code : corpus.alphabet.unk());
        }
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

inline SequenceCorpus load_fasta(const std::filesystem::path& path,
                                 std::optional<std::string_view> alphabet_spec = std::nullopt)
{
    auto raw = read_fasta(path);
    return encode_corpus(raw, alphabet_spec);
}

inline SequenceCorpus load_labeled_text(const std::filesystem::path& path)
{
    auto raw = read_labeled_text(path);
    return encode_corpus(raw, text_dictionary);
}

} // namespace gakco

#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cqlab
{
    /// Base class for all library errors.
    struct error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    /// Malformed input text; carries a 1-based line number (0 = unknown).
    struct parse_error : error
    {
        int line;
        parse_error(int line_, const std::string & msg) :
            error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
    };

    /// An operation was called outside its contract.
    struct precondition_error : error
    {
        using error::error;
    };

    /// A configurable size cap was exceeded; the operation refused to run.
    struct size_limit_error : error
    {
        using error::error;
    };

    /// An external or simulated oracle misbehaved.
    struct protocol_error : error
    {
        using error::error;
    };

    struct Relation
    {
        std::string name;
        int arity = 1;

        auto operator<=>(const Relation &) const = default;
    };

    class Schema
    {
    public:
        Schema() = default;
        explicit Schema(std::vector<Relation> relations);

        static Schema parse(std::string_view text);

        const std::vector<Relation> & relations() const { return relations_; }
        const Relation * find(std::string_view name) const;
        int arity(std::string_view name) const;
        int index_of(std::string_view name) const;
        bool all_binary() const;
        bool empty() const { return relations_.empty(); }
        std::string to_string() const;

        bool operator==(const Schema &) const = default;

    private:
        std::vector<Relation> relations_;
    };

    struct Fact
    {
        std::string rel;
        std::vector<std::string> args;

        auto operator<=>(const Fact &) const = default;
        std::string to_string() const;
    };

    /// True iff every character is legal in an element / variable / relation token.
    bool valid_token(std::string_view s);

    /// Rewrites arbitrary text into the token charset (used for generated names).
    std::string mangle_token(std::string_view s);
}

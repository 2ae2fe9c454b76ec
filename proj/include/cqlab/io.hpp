#pragma once

#include <cqlab/cq.hpp>
#include <cqlab/structure.hpp>

#include <filesystem>
#include <string>

namespace cqlab
{
    PointedStructure parse_structure(std::string_view text);
    std::string encode_structure(const PointedStructure & a);

    ConjunctiveQuery parse_cq(std::string_view text, bool allow_unsafe = false);
    std::string encode_cq(const ConjunctiveQuery & q);

    PointedStructure load_structure(const std::filesystem::path & file);
    ConjunctiveQuery load_cq(const std::filesystem::path & file, bool allow_unsafe = false);
    void save_text(const std::filesystem::path & file, const std::string & text);
}

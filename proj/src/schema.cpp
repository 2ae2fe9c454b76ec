#include <cqlab/schema.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace cqlab
{
    namespace
    {
        auto trim(std::string_view s) -> std::string_view
        {
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        }
    }

    bool valid_token(std::string_view s)
    {
        if (s.empty())
            return false;
        for (char c : s)
            if (std::isspace(static_cast<unsigned char>(c)) || c == '#' || c == ',' || c == '(' || c == ')' || c == ':')
                return false;
        return true;
    }

    std::string mangle_token(std::string_view s)
    {
        std::string out;
        out.reserve(s.size());
        for (char c : s) {
            if (std::isspace(static_cast<unsigned char>(c)))
                out += '_';
            else switch (c) {
                case '#': out += '~'; break;
                case ',': out += ';'; break;
                case '(': out += '{'; break;
                case ')': out += '}'; break;
                case ':': out += '='; break;
                default: out += c;
            }
        }
        if (out.empty())
            out = "_";
        return out;
    }

    Schema::Schema(std::vector<Relation> relations) :
        relations_(std::move(relations))
    {
        std::sort(relations_.begin(), relations_.end());
        std::set<std::string> seen;
        for (const auto & r : relations_) {
            if (! valid_token(r.name))
                throw error{"bad relation name '" + r.name + "'"};
            if (r.arity < 1)
                throw error{"relation " + r.name + " has arity < 1"};
            if (! seen.insert(r.name).second)
                throw error{"duplicate relation " + r.name};
        }
    }

    Schema Schema::parse(std::string_view text)
    {
        std::vector<Relation> rels;
        std::string item;
        std::stringstream ss{std::string(text)};
        while (std::getline(ss, item, ',')) {
            auto t = trim(item);
            if (t.empty())
                continue;
            auto slash = t.rfind('/');
            if (slash == std::string_view::npos)
                throw error{"expected name/arity, got '" + std::string(t) + "'"};
            auto name = std::string(trim(t.substr(0, slash)));
            int arity = 0;
            try {
                arity = std::stoi(std::string(trim(t.substr(slash + 1))));
            }
            catch (const std::exception &) {
                throw error{"bad arity in '" + std::string(t) + "'"};
            }
            rels.push_back(Relation{name, arity});
        }
        return Schema(std::move(rels));
    }

    const Relation * Schema::find(std::string_view name) const
    {
        for (const auto & r : relations_)
            if (r.name == name)
                return &r;
        return nullptr;
    }

    int Schema::arity(std::string_view name) const
    {
        if (const auto * r = find(name))
            return r->arity;
        throw error{"unknown relation '" + std::string(name) + "'"};
    }

    int Schema::index_of(std::string_view name) const
    {
        for (std::size_t i = 0; i < relations_.size(); ++i)
            if (relations_[i].name == name)
                return int(i);
        throw error{"unknown relation '" + std::string(name) + "'"};
    }

    bool Schema::all_binary() const
    {
        return std::all_of(relations_.begin(), relations_.end(),
                           [](const Relation & r) { return r.arity == 2; });
    }

    std::string Schema::to_string() const
    {
        std::string out;
        for (const auto & r : relations_) {
            if (! out.empty())
                out += ", ";
            out += r.name + "/" + std::to_string(r.arity);
        }
        return out;
    }

    std::string Fact::to_string() const
    {
        std::string out = rel + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i)
                out += ",";
            out += args[i];
        }
        return out + ")";
    }
}

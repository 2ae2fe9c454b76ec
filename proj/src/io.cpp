#include <cqlab/io.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cqlab
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        }

        std::vector<std::string> split_list(std::string_view s, int line)
        {
            std::vector<std::string> out;
            std::string item;
            std::stringstream ss{std::string(s)};
            while (std::getline(ss, item, ',')) {
                auto t = trim(item);
                if (t.empty()) {
                    if (! s.empty())
                        throw parse_error{line, "empty item in comma-separated list"};
                    continue;
                }
                if (! valid_token(t))
                    throw parse_error{line, "bad token '" + std::string(t) + "'"};
                out.emplace_back(t);
            }
            return out;
        }

        Fact parse_fact_text(std::string_view t, int line)
        {
            auto open = t.find('(');
            auto close = t.rfind(')');
            if (open == std::string_view::npos || close == std::string_view::npos || close < open
                || close != t.size() - 1)
                throw parse_error{line, "expected fact of the form R(a,b)"};
            Fact f;
            auto name = trim(t.substr(0, open));
            if (! valid_token(name))
                throw parse_error{line, "bad relation name '" + std::string(name) + "'"};
            f.rel = std::string(name);
            auto inner = t.substr(open + 1, close - open - 1);
            if (trim(inner).empty())
                throw parse_error{line, "fact needs at least one argument"};
            f.args = split_list(inner, line);
            return f;
        }
    }

    PointedStructure parse_structure(std::string_view text)
    {
        std::optional<Schema> schema;
        std::optional<std::vector<std::string>> elements;
        std::optional<std::vector<std::string>> dist;
        std::vector<std::pair<Fact, int>> facts;

        int line_no = 0;
        std::stringstream ss{std::string(text)};
        std::string raw;
        while (std::getline(ss, raw)) {
            ++line_no;
            std::string_view line = raw;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;

            if (line.starts_with("schema:")) {
                if (schema)
                    throw parse_error{line_no, "duplicate schema line"};
                try {
                    schema = Schema::parse(line.substr(7));
                }
                catch (const error & e) {
                    throw parse_error{line_no, e.what()};
                }
            }
            else if (line.starts_with("elements:")) {
                if (elements)
                    throw parse_error{line_no, "duplicate elements line"};
                elements = split_list(line.substr(9), line_no);
            }
            else if (line.starts_with("distinguished:")) {
                if (dist)
                    throw parse_error{line_no, "duplicate distinguished line"};
                dist = split_list(line.substr(14), line_no);
            }
            else
                facts.emplace_back(parse_fact_text(line, line_no), line_no);
        }

        if (! schema)
            throw parse_error{0, "missing schema line"};
        if (! elements)
            throw parse_error{0, "missing elements line"};

        std::vector<std::string> dom = *elements;
        std::sort(dom.begin(), dom.end());

        auto in_domain = [&](const std::string & x) {
            return std::binary_search(dom.begin(), dom.end(), x);
        };

        for (const auto & [f, ln] : facts) {
            const auto * rel = schema->find(f.rel);
            if (! rel)
                throw parse_error{ln, "undeclared relation " + f.rel};
            if (int(f.args.size()) != rel->arity)
                throw parse_error{ln, "arity mismatch: " + f.rel + " expects " + std::to_string(rel->arity)
                                          + " arguments, got " + std::to_string(f.args.size())};
            for (const auto & a : f.args)
                if (! in_domain(a))
                    throw parse_error{ln, "fact argument '" + a + "' not declared in elements"};
        }
        if (dist)
            for (const auto & d : *dist)
                if (! in_domain(d))
                    throw parse_error{0, "distinguished element '" + d + "' not declared in elements"};

        std::vector<Fact> just_facts;
        for (auto & [f, ln] : facts)
            just_facts.push_back(std::move(f));

        return PointedStructure(*schema, std::move(dom), std::move(just_facts),
                                dist.value_or(std::vector<std::string>{}));
    }

    std::string encode_structure(const PointedStructure & a)
    {
        std::string out = "schema: " + a.schema().to_string() + "\n";
        out += "elements:";
        for (std::size_t i = 0; i < a.domain().size(); ++i)
            out += (i ? ", " : " ") + a.domain()[i];
        out += "\n";
        if (a.k() > 0) {
            out += "distinguished:";
            for (std::size_t i = 0; i < a.dist().size(); ++i)
                out += (i ? ", " : " ") + a.dist()[i];
            out += "\n";
        }
        for (const auto & f : a.facts())
            out += f.to_string() + "\n";
        return out;
    }

    ConjunctiveQuery parse_cq(std::string_view text, bool allow_unsafe)
    {
        std::optional<Schema> schema;
        std::string body;
        int body_line = 0;

        int line_no = 0;
        std::stringstream ss{std::string(text)};
        std::string raw;
        while (std::getline(ss, raw)) {
            ++line_no;
            std::string_view line = raw;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            if (line.starts_with("schema:")) {
                if (schema)
                    throw parse_error{line_no, "duplicate schema line"};
                try {
                    schema = Schema::parse(line.substr(7));
                }
                catch (const error & e) {
                    throw parse_error{line_no, e.what()};
                }
            }
            else {
                if (! body.empty())
                    throw parse_error{line_no, "more than one query in input"};
                body = std::string(line);
                body_line = line_no;
            }
        }

        if (! schema)
            throw parse_error{0, "missing schema line"};
        if (body.empty())
            throw parse_error{0, "missing query"};

        auto sep = body.find(":-");
        if (sep == std::string::npos)
            throw parse_error{body_line, "expected 'q(...) :- atoms'"};

        std::string_view head = trim(std::string_view(body).substr(0, sep));
        std::string_view atoms_text = trim(std::string_view(body).substr(sep + 2));

        auto open = head.find('(');
        auto close = head.rfind(')');
        if (open == std::string_view::npos || close != head.size() - 1)
            throw parse_error{body_line, "bad query head"};
        auto head_inner = trim(head.substr(open + 1, close - open - 1));
        std::vector<std::string> head_vars;
        if (! head_inner.empty())
            head_vars = split_list(head_inner, body_line);

        // split atoms on commas at paren depth zero
        std::vector<Fact> atoms;
        int depth = 0;
        std::string cur;
        auto flush = [&]() {
            auto t = trim(cur);
            if (t.empty())
                throw parse_error{body_line, "empty atom"};
            atoms.push_back(parse_fact_text(t, body_line));
            cur.clear();
        };
        for (char c : atoms_text) {
            if (c == '(')
                ++depth;
            if (c == ')')
                --depth;
            if (c == ',' && depth == 0)
                flush();
            else
                cur += c;
        }
        if (! trim(cur).empty())
            flush();
        if (atoms.empty())
            throw parse_error{body_line, "query needs at least one atom"};

        for (const auto & a : atoms) {
            const auto * rel = schema->find(a.rel);
            if (! rel)
                throw parse_error{body_line, "undeclared relation " + a.rel};
            if (int(a.args.size()) != rel->arity)
                throw parse_error{body_line, "arity mismatch in atom " + a.to_string()};
        }

        try {
            return ConjunctiveQuery(*schema, std::move(head_vars), std::move(atoms), allow_unsafe);
        }
        catch (const error & e) {
            throw parse_error{body_line, e.what()};
        }
    }

    std::string encode_cq(const ConjunctiveQuery & q)
    {
        std::string out = "schema: " + q.schema().to_string() + "\n";
        out += "q(";
        for (std::size_t i = 0; i < q.head_vars().size(); ++i)
            out += (i ? ", " : "") + q.head_vars()[i];
        out += ") :- ";
        auto atoms = q.atoms();
        std::sort(atoms.begin(), atoms.end());
        for (std::size_t i = 0; i < atoms.size(); ++i)
            out += (i ? ", " : "") + atoms[i].to_string();
        out += "\n";
        return out;
    }

    PointedStructure load_structure(const std::filesystem::path & file)
    {
        std::ifstream in(file);
        if (! in)
            throw error{"cannot open " + file.string()};
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_structure(ss.str());
    }

    ConjunctiveQuery load_cq(const std::filesystem::path & file, bool allow_unsafe)
    {
        std::ifstream in(file);
        if (! in)
            throw error{"cannot open " + file.string()};
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_cq(ss.str(), allow_unsafe);
    }

    void save_text(const std::filesystem::path & file, const std::string & text)
    {
        std::ofstream out(file);
        if (! out)
            throw error{"cannot write " + file.string()};
        out << text;
    }
}

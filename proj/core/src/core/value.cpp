/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <dstream/core/error.hpp>
#include <dstream/core/value.hpp>

#include <bit>
#include <cstring>
#include <sstream>

namespace dstream {

namespace {

[[noreturn]] void kindMismatch(const char* wanted, const Value& v) {
    throw Error(ErrorCode::kInvalidOperation, std::string("value is not a ") + wanted + ": " + v.to_string());
}

void putU64(std::string& out, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
    }
}

void putString(std::string& out, std::string_view s) {
    putU64(out, s.size());
    out.append(s);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    x *= 0x9e3779b97f4a7c15ULL;
    x ^= x >> 32;
    return (h ^ x) * 0xff51afd7ed558ccdULL + 0x2545F4914F6CDD1DULL;
}

}// namespace

bool Value::as_bool() const {
    if (auto* b = std::get_if<bool>(&data_)) {
        return *b;
    }
    kindMismatch("bool", *this);
}

std::int64_t Value::as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&data_)) {
        return *i;
    }
    kindMismatch("int", *this);
}

double Value::as_double() const {
    if (auto* d = std::get_if<double>(&data_)) {
        return *d;
    }
    if (auto* i = std::get_if<std::int64_t>(&data_)) {
        return static_cast<double>(*i);
    }
    kindMismatch("number", *this);
}

const std::string& Value::as_string() const {
    if (auto* s = std::get_if<std::string>(&data_)) {
        return *s;
    }
    kindMismatch("string", *this);
}

const Value::List& Value::as_list() const {
    if (auto* l = std::get_if<ListPtr>(&data_)) {
        return **l;
    }
    kindMismatch("list", *this);
}

const Value::Dict& Value::as_dict() const {
    if (auto* d = std::get_if<DictPtr>(&data_)) {
        return **d;
    }
    kindMismatch("dict", *this);
}

const WorkerRef& Value::as_worker() const {
    if (auto* w = std::get_if<WorkerRef>(&data_)) {
        return *w;
    }
    kindMismatch("worker reference", *this);
}

const Value& Value::operator[](std::size_t i) const {
    const auto& l = as_list();
    if (i >= l.size()) {
        throw Error(ErrorCode::kInvalidOperation,
                    "list index " + std::to_string(i) + " out of range (size " + std::to_string(l.size()) + ")");
    }
    return l[i];
}

std::size_t Value::size() const {
    switch (kind()) {
        case Kind::kList: return as_list().size();
        case Kind::kDict: return as_dict().size();
        case Kind::kString: return as_string().size();
        default: return 0;
    }
}

const Value& Value::at(std::string_view field) const {
    const auto& d = as_dict();
    auto it = d.find(field);
    if (it == d.end()) {
        throw Error(ErrorCode::kInvalidOperation, "missing field '" + std::string(field) + "' in " + to_string());
    }
    return it->second;
}

bool Value::contains(std::string_view field) const {
    return is_dict() && as_dict().find(field) != as_dict().end();
}

void Value::encode(std::string& out) const {
    out.push_back(static_cast<char>(data_.index()));
    switch (kind()) {
        case Kind::kNull: break;
        case Kind::kBool: out.push_back(as_bool() ? 1 : 0); break;
        case Kind::kInt: putU64(out, static_cast<std::uint64_t>(as_int())); break;
        case Kind::kDouble: putU64(out, std::bit_cast<std::uint64_t>(std::get<double>(data_))); break;
        case Kind::kString: putString(out, as_string()); break;
        case Kind::kList:
            putU64(out, as_list().size());
            for (const auto& v : as_list()) {
                v.encode(out);
            }
            break;
        case Kind::kDict:
            putU64(out, as_dict().size());
            for (const auto& [k, v] : as_dict()) {
                putString(out, k);
                v.encode(out);
            }
            break;
        case Kind::kWorker: {
            const auto& w = as_worker();
            putU64(out, w.node);
            putU64(out, w.id);
            putString(out, w.role);
            break;
        }
    }
}

std::string Value::encoded() const {
    std::string out;
    encode(out);
    return out;
}

std::string Value::to_string() const {
    std::ostringstream os;
    switch (kind()) {
        case Kind::kNull: os << "null"; break;
        case Kind::kBool: os << (as_bool() ? "true" : "false"); break;
        case Kind::kInt: os << as_int(); break;
        case Kind::kDouble: os << std::get<double>(data_); break;
        case Kind::kString: os << '"' << as_string() << '"'; break;
        case Kind::kList: {
            os << '[';
            bool first = true;
            for (const auto& v : as_list()) {
                os << (first ? "" : ", ") << v.to_string();
                first = false;
            }
            os << ']';
            break;
        }
        case Kind::kDict: {
            os << '{';
            bool first = true;
            for (const auto& [k, v] : as_dict()) {
                os << (first ? "" : ", ") << k << ": " << v.to_string();
                first = false;
            }
            os << '}';
            break;
        }
        case Kind::kWorker: {
            const auto& w = as_worker();
            os << "<worker " << w.id << '@' << w.node << ':' << w.role << '>';
            break;
        }
    }
    return os.str();
}

std::size_t Value::hash() const {
    std::uint64_t h = data_.index();
    switch (kind()) {
        case Kind::kNull: break;
        case Kind::kBool: h = mix(h, as_bool()); break;
        case Kind::kInt: h = mix(h, static_cast<std::uint64_t>(as_int())); break;
        case Kind::kDouble: h = mix(h, std::bit_cast<std::uint64_t>(std::get<double>(data_))); break;
        case Kind::kString: h = mix(h, fnv1a(as_string())); break;
        case Kind::kList:
            for (const auto& v : as_list()) {
                h = mix(h, v.hash());
            }
            break;
        case Kind::kDict:
            for (const auto& [k, v] : as_dict()) {
                h = mix(mix(h, fnv1a(k)), v.hash());
            }
            break;
        case Kind::kWorker: h = mix(mix(h, as_worker().node), as_worker().id); break;
    }
    return static_cast<std::size_t>(h);
}

bool operator==(const Value& a, const Value& b) {
    if (a.data_.index() != b.data_.index()) {
        return false;
    }
    switch (a.kind()) {
        case Value::Kind::kList: {
            const auto& pa = std::get<Value::ListPtr>(a.data_);
            const auto& pb = std::get<Value::ListPtr>(b.data_);
            return pa == pb || *pa == *pb;
        }
        case Value::Kind::kDict: {
            const auto& pa = std::get<Value::DictPtr>(a.data_);
            const auto& pb = std::get<Value::DictPtr>(b.data_);
            return pa == pb || *pa == *pb;
        }
        default: return a.data_ == b.data_;
    }
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.data_.index() != b.data_.index()) {
        return a.data_.index() <=> b.data_.index();
    }
    switch (a.kind()) {
        case Value::Kind::kNull: return std::strong_ordering::equal;
        case Value::Kind::kBool: return a.as_bool() <=> b.as_bool();
        case Value::Kind::kInt: return a.as_int() <=> b.as_int();
        case Value::Kind::kDouble: {
            // total order over bit patterns keeps NaN payloads comparable
            double x = a.as_double();
            double y = b.as_double();
            if (x < y) return std::strong_ordering::less;
            if (y < x) return std::strong_ordering::greater;
            return std::bit_cast<std::uint64_t>(x) <=> std::bit_cast<std::uint64_t>(y);
        }
        case Value::Kind::kString: return a.as_string().compare(b.as_string()) <=> 0;
        case Value::Kind::kList: {
            const auto& la = a.as_list();
            const auto& lb = b.as_list();
            return std::lexicographical_compare_three_way(la.begin(), la.end(), lb.begin(), lb.end());
        }
        case Value::Kind::kDict: {
            const auto& da = a.as_dict();
            const auto& db = b.as_dict();
            auto ia = da.begin();
            auto ib = db.begin();
            for (; ia != da.end() && ib != db.end(); ++ia, ++ib) {
                if (auto c = ia->first.compare(ib->first) <=> 0; c != 0) return c;
                if (auto c = ia->second <=> ib->second; c != 0) return c;
            }
            return da.size() <=> db.size();
        }
        case Value::Kind::kWorker: return a.as_worker() <=> b.as_worker();
    }
    return std::strong_ordering::equal;
}

std::uint64_t digest(const Value& v) {
    return fnv1a(v.encoded());
}

}// namespace dstream

// Reply sequences: finite words over {T, F} plus the wildcard *, which
// matches either reply when the wildcard adaptation is enabled.

#ifndef ISPLAB_REPLYSEQ_HPP
#define ISPLAB_REPLYSEQ_HPP

#include <compare>
#include <stdexcept>
#include <string>

namespace isplab {

enum class Reply : char { True = 'T', False = 'F', Star = '*' };

inline Reply reply_of(bool b) { return b ? Reply::True : Reply::False; }

inline bool reply_matches(Reply pattern, bool actual) {
    if (pattern == Reply::Star) return true;
    return pattern == reply_of(actual);
}

class ReplySeq {
public:
    ReplySeq() = default;
    explicit ReplySeq(std::string symbols) : s_(std::move(symbols)) {
        for (char c : s_)
            if (c != 'T' && c != 'F' && c != '*')
                throw std::invalid_argument("bad reply symbol in sequence");
    }

    int size() const { return static_cast<int>(s_.size()); }
    bool empty() const { return s_.empty(); }
    Reply at(int i) const { return static_cast<Reply>(s_.at(static_cast<size_t>(i))); }
    Reply head() const { return at(0); }

    ReplySeq tail() const { return ReplySeq(s_.substr(1)); }
    ReplySeq drop(int n) const { return ReplySeq(s_.substr(static_cast<size_t>(n))); }
    ReplySeq append(Reply r) const { return ReplySeq(s_ + static_cast<char>(r)); }

    bool is_prefix_of(const ReplySeq& other) const {
        return size() <= other.size() && other.s_.compare(0, s_.size(), s_) == 0;
    }

    // ε prints as "-"; JSON uses the raw symbol string.
    std::string str() const { return s_.empty() ? "-" : s_; }
    const std::string& symbols() const { return s_; }

    auto operator<=>(const ReplySeq&) const = default;

private:
    std::string s_;
};

}  // namespace isplab

#endif

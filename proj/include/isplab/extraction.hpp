// Process extraction: the reference transition system of a regular thread.
//
// Each residual thread becomes a state.  A postconditional state performs
// snd_f(m), waits, and branches on rcv_f(T)/rcv_f(F); termination performs a
// visible stp into a terminating sink; deadlock performs i into a dead sink.
// stp stays visible here; hiding it is the comparison pipeline's job so both
// sides of the check are treated uniformly.

#ifndef ISPLAB_EXTRACTION_HPP
#define ISPLAB_EXTRACTION_HPP

#include "isplab/bta.hpp"
#include "isplab/lts.hpp"

namespace isplab {

Lts extract_lts(const ThreadHandle& t);

}  // namespace isplab

#endif

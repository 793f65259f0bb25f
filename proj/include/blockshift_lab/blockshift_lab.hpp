#ifndef BLOCKSHIFT_LAB_HPP
#define BLOCKSHIFT_LAB_HPP

#include "blockshift_lab/types.hpp"
#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/irreducibility.hpp"
#include "blockshift_lab/similarity.hpp"
#include "blockshift_lab/kernels.hpp"
#include "blockshift_lab/oracle.hpp"
#include "blockshift_lab/io.hpp"
#include "blockshift_lab/case_runner.hpp"

#endif  // BLOCKSHIFT_LAB_HPP

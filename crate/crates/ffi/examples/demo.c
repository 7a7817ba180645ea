#include <stdio.h>
#include <assert.h>
#include "designcoded.h"

int main(void) {
    dcc_scheme *scheme = NULL;
    assert(dcc_build_bibd_projective(2, &scheme) == DccOk);
    DccParams params;
    assert(dcc_scheme_params(scheme, &params) == DccOk);
    printf("K=%llu F=%llu S=%llu g=%llu r=%llu\n",
           (unsigned long long)params.users, (unsigned long long)params.subfiles,
           (unsigned long long)params.cover_size, (unsigned long long)params.identity_size,
           (unsigned long long)params.computation_load);
    DccRatio rate;
    assert(dcc_simulate_caching(scheme, 7, 16, 1, &rate) == DccOk);
    printf("rate=%llu/%llu\n", (unsigned long long)rate.num, (unsigned long long)rate.den);
    DccRatio load;
    assert(dcc_simulate_mapreduce(scheme, 2, 64, 1, DccNoStragglers, 0, &load) == DccOk);
    printf("load=%llu/%llu\n", (unsigned long long)load.num, (unsigned long long)load.den);
    dcc_scheme_free(scheme);
    dcc_scheme *bad = NULL;
    assert(dcc_build_bibd_projective(6, &bad) == DccInvalidParameter);
    printf("error=%s\n", dcc_last_error());
    return 0;
}

#ifndef OTDUAL_H
#define OTDUAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OTD_API __declspec(dllexport)
#else
#define OTD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otd_status {
  OTD_OK = 0,
  OTD_ERR_SCHEMA = 1,
  OTD_ERR_INCONSISTENT = 2,
  OTD_ERR_NON_CONVERGENCE = 3,
  OTD_ERR_INVALID_ARGUMENT = 4,
  OTD_ERR_NUMERICAL_RANGE = 5,
  OTD_ERR_INTERNAL = 6
} otd_status;

typedef struct otd_instance otd_instance;
typedef struct otd_game otd_game;

/* Strings returned through `char** out` are owned by the caller; release them with
   otd_string_free. On failure *out is set to NULL and otd_last_error() describes it. */

OTD_API otd_status otd_instance_parse(const char* json, otd_instance** out);
OTD_API void otd_instance_free(otd_instance* instance);
OTD_API otd_status otd_instance_dims(const otd_instance* instance, size_t* n_x, size_t* n_y);

/* Exact optimal value as "p/q". */
OTD_API otd_status otd_ot_value(const otd_instance* instance, char** out);

/* `anchor` is the 1-based x atom with phi(anchor) = 0. */
OTD_API otd_status otd_solve_json(const otd_instance* instance, size_t anchor, char** out);
OTD_API otd_status otd_duals_json(const otd_instance* instance, size_t anchor, char** out);
OTD_API otd_status otd_centroid_json(const otd_instance* instance, size_t anchor, char** out);
OTD_API otd_status otd_sinkhorn_json(const otd_instance* instance, double epsilon, double tol, size_t anchor,
                                     char** out);
/* `instance` may be NULL to run only the seeded random batch. */
OTD_API otd_status otd_validate_json(const otd_instance* instance, uint64_t seed, size_t random_count, char** out);

OTD_API otd_status otd_game_parse(const char* json, otd_game** out);
OTD_API void otd_game_free(otd_game* game);
OTD_API otd_status otd_cne_json(const otd_game* game, double epsilon, double tol, char** out);
/* k-independent objectives use the smoothed construction; k-dependent ones the grid search. */
OTD_API otd_status otd_scne_json(const otd_game* game, double epsilon, double tol, char** out);

/* JSON error object of the last failure on this thread ("" when none). */
OTD_API const char* otd_last_error(void);
OTD_API void otd_string_free(char* s);
OTD_API const char* otd_version(void);

#ifdef __cplusplus
}
#endif

#endif

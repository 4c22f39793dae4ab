from hypothesis import HealthCheck, settings

# table construction is cached across examples, which trips the default
# deadline heuristics on first use
settings.register_profile(
    "invkloos",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.data_too_large],
)
settings.load_profile("invkloos")

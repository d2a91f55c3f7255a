"""Simulated environments (thermostat, asteroids-lite) and the harness that drives them."""

"""Rendering -- SVG phase-diagram heatmaps."""

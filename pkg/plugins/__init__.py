"""Plugins -- measure-family samplers discovered through PLUGIN_META."""

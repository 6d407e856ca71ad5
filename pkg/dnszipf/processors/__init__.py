from .detector import StreamRouter, TunnelDetector, classify, explain, format_line, score_window

__all__ = ["StreamRouter", "TunnelDetector", "classify", "explain", "format_line", "score_window"]

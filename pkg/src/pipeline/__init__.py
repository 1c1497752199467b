from src.pipeline.runner import FibrationPipeline

__all__ = ["FibrationPipeline"]

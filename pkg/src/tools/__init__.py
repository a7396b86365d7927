from src.tools.pipeline_tools import (
    TOOLS,
    PipelineTool,
    GenGgeTool,
    GenLindbladTool,
    GenCircuitTool,
    TrainTool,
    SweepTool,
    IntrinsicDimTool,
    EmbedTool,
    CorrelateTool,
    ReconstructTool,
    ReportTool,
)

__all__ = [
    "TOOLS",
    "PipelineTool",
    "GenGgeTool",
    "GenLindbladTool",
    "GenCircuitTool",
    "TrainTool",
    "SweepTool",
    "IntrinsicDimTool",
    "EmbedTool",
    "CorrelateTool",
    "ReconstructTool",
    "ReportTool",
]

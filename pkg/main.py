from dotenv import load_dotenv
load_dotenv()  # SKYRME_* settings for every imported module

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from apis.kernel import router as kernel_router
from apis.scan import router as scan_router
from apis.verify import router as verify_router

app = FastAPI(title="Skyrme Hedgehog Lab")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"], allow_credentials=True,
    allow_methods=["*"], allow_headers=["*"],
)

app.include_router(verify_router)
app.include_router(scan_router)
app.include_router(kernel_router)

@app.get("/")
def root():
    return {"ok": True, "service": "Skyrme Hedgehog Lab"}
